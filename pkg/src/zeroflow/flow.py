"""Interacting-particle flow whose stationary point is the eigenpolynomial
zero set, plus trajectory recording, rate estimation, and initializers.

The system of ordinary differential equations is

    dx_i/dt = R_i(x) = p(x_i) * sum_{k != i} 2/(x_i - x_k) + p'(x_i) - q(x_i)

(the right-hand side is exactly the electrostatic residual).  For
p(x) = x = q(x) the first component reads, written out for three particles,

    dx/dt = 2x/(x - y) + 2x/(x - z) + 1 - x

and for p(x) = 1 - x^2, q = 0 the components are

    dx_i/dt = (1 - x_i^2) * sum_{k != i} 2/(x_i - x_k) - 2 x_i.

Note the coefficient multiplying the pair sum is the full quadratic
1 - x_i^2, not (1 - x_i)^2; only that reading makes the zero set of the
degree-n eigenpolynomial stationary, which is also confirmed numerically
by the stationarity tests.

When the eigenvalues lambda_0 < ... < lambda_n are simple and increasing,
the flow converges from any ordered start to the eigenpolynomial zeros, and
the error decays like exp(-sigma t) with sigma >= lambda_n - lambda_{n-1};
the linearization at the fixed point has eigenvalues lambda_k - lambda_n
for k < n, so it is strictly stable.

The integrator is an explicit embedded Dormand-Prince 5(4) pair with two
extra accept/reject guards per step: the particle ordering and domain
membership must be preserved, and the minimum inter-particle gap may shrink
by at most 50% in one step.  Steps violating a guard are rejected and
halved.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import Configuration, _residual_array, residual
from .errors import InsufficientDecay
from .operator_core import EquationSpec, eigenvalue_gap

__all__ = [
    "TerminationReason",
    "Snapshot",
    "FlowOptions",
    "Trajectory",
    "RateReport",
    "InitStrategy",
    "flow_rhs",
    "integrate",
    "estimate_rate",
    "default_init",
    "recommended_stride",
    "convergence_options",
]


class TerminationReason(enum.Enum):
    CONVERGED = "converged"
    MAX_TIME = "max_time"
    COLLISION_IMMINENT = "collision_imminent"
    LEFT_DOMAIN = "left_domain"
    MAX_STEPS_EXCEEDED = "max_steps_exceeded"

    @property
    def is_error(self) -> bool:
        return self not in (TerminationReason.CONVERGED, TerminationReason.MAX_TIME)


@dataclass(frozen=True)
class Snapshot:
    t: float
    config: Configuration
    residual_norm: float


@dataclass(frozen=True)
class FlowOptions:
    """Integration controls.  All fields must be positive."""

    t_max: float
    residual_tol: float = 1e-9
    initial_step: float = 1e-4
    max_steps: int = 1_000_000
    snapshot_stride: int = 1
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10

    def __post_init__(self):
        for name in (
            "t_max",
            "residual_tol",
            "initial_step",
            "max_steps",
            "snapshot_stride",
            "rel_tol",
            "abs_tol",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"FlowOptions.{name} must be positive")


@dataclass(frozen=True)
class Trajectory:
    snapshots: tuple[Snapshot, ...]
    spec: EquationSpec
    terminated_by: TerminationReason
    accepted_steps: int = 0
    rejected_steps: int = 0

    @property
    def final(self) -> Snapshot:
        return self.snapshots[-1]

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    def positions(self) -> np.ndarray:
        """Snapshot positions as an (n_snapshots, n) array."""
        return np.array([s.config.points for s in self.snapshots])


@dataclass(frozen=True)
class RateReport:
    sigma_hat: float
    theoretical_gap: float
    fit_window: tuple[float, float]
    fit_quality: float


class InitStrategy(str, enum.Enum):
    EQUISPACED = "equispaced"
    SEEDED = "seeded"
    INDEXED = "indexed"


def flow_rhs(spec: EquationSpec, config: Configuration) -> np.ndarray:
    """Right-hand side of the particle system; equals residual(spec, config)
    exactly."""
    return residual(spec, config)


# Dormand-Prince 5(4): propagate the 5th order solution, estimate the error
# against the embedded 4th order one.  FSAL: the last stage at the accepted
# point is the first stage of the next step.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B5 - _B4

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_COLLISION_SCALE = 1e-13


def _min_gap(x: np.ndarray) -> float:
    return float(np.min(np.diff(x))) if x.size > 1 else math.inf


def integrate(
    spec: EquationSpec, start: Configuration, opts: FlowOptions
) -> Trajectory:
    """Integrate the particle system from an ordered start.

    Terminates with CONVERGED when the residual max-norm drops below
    opts.residual_tol, with MAX_TIME at t_max, or with an error reason when
    a guard keeps failing at the minimum step size or the step budget is
    exhausted.  The trajectory records every snapshot_stride-th accepted
    step plus the initial and final states.
    """
    x = start.as_array()
    lo, hi = spec.domain.lower, spec.domain.upper
    if not (np.all(x > lo) and np.all(x < hi)):
        raise ValueError("start configuration must lie inside the open domain")
    n = x.size

    def rhs(y: np.ndarray) -> np.ndarray:
        return _residual_array(spec, y)

    f = rhs(x)
    snaps = [Snapshot(0.0, Configuration(tuple(x)), float(np.max(np.abs(f))))]
    if snaps[0].residual_norm < opts.residual_tol:
        return Trajectory(tuple(snaps), spec, TerminationReason.CONVERGED, 0, 0)

    t = 0.0
    h = min(opts.initial_step, opts.t_max)
    accepted = rejected = 0
    ks = np.empty((7, n))

    def finish(reason: TerminationReason) -> Trajectory:
        if snaps[-1].t < t:
            snaps.append(
                Snapshot(t, Configuration(tuple(x)), float(np.max(np.abs(f))))
            )
        return Trajectory(tuple(snaps), spec, reason, accepted, rejected)

    while True:
        if accepted + rejected >= opts.max_steps:
            return finish(TerminationReason.MAX_STEPS_EXCEEDED)
        h = min(h, opts.t_max - t)

        ks[0] = f
        broke = False
        for i in range(1, 7):
            yi = x + h * (ks[:i].T @ _A[i])
            if not np.all(np.isfinite(yi)) or (n > 1 and np.any(np.diff(yi) <= 0)):
                broke = True
                break
            ks[i] = rhs(yi)
        y_new = yi if not broke else None  # stage 7 argument is the 5th order solution

        ordered = (
            not broke
            and np.all(np.isfinite(ks))
            and np.all(y_new > lo)
            and np.all(y_new < hi)
            and (n < 2 or np.all(np.diff(y_new) > 0))
        )
        gap_ok = True
        if ordered and n > 1:
            gap_ok = _min_gap(y_new) >= 0.5 * _min_gap(x)

        if ordered and gap_ok:
            scale = opts.abs_tol + opts.rel_tol * np.maximum(np.abs(x), np.abs(y_new))
            err = float(
                np.sqrt(np.mean(np.square(h * (ks.T @ _E) / scale)))
            )
        else:
            err = math.inf

        if err > 1.0:
            rejected += 1
            factor = (
                0.5
                if not math.isfinite(err)
                else max(_MIN_FACTOR, _SAFETY * err ** -0.2)
            )
            h *= factor
            h_min = 1e-14 * max(1.0, t)
            if h < h_min:
                if not ordered and not broke and (
                    np.any(y_new <= lo) or np.any(y_new >= hi)
                ):
                    return finish(TerminationReason.LEFT_DOMAIN)
                return finish(TerminationReason.COLLISION_IMMINENT)
            continue

        t += h
        x = y_new
        f = ks[6]  # FSAL: rhs at the accepted point
        accepted += 1
        rnorm = float(np.max(np.abs(f)))

        if rnorm < opts.residual_tol:
            snaps.append(Snapshot(t, Configuration(tuple(x)), rnorm))
            return Trajectory(
                tuple(snaps), spec, TerminationReason.CONVERGED, accepted, rejected
            )
        if t >= opts.t_max * (1.0 - 1e-15):
            snaps.append(Snapshot(t, Configuration(tuple(x)), rnorm))
            return Trajectory(
                tuple(snaps), spec, TerminationReason.MAX_TIME, accepted, rejected
            )
        if accepted % opts.snapshot_stride == 0:
            snaps.append(Snapshot(t, Configuration(tuple(x)), rnorm))

        factor = _MAX_FACTOR if err == 0.0 else min(
            _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err ** -0.2)
        )
        h *= factor


def estimate_rate(traj: Trajectory, reference: Configuration) -> RateReport:
    """Least-squares decay rate of log max_i |x_i(t) - x_i*| over the tail
    window where the error sits between 1e-3 and 1e-9 of its initial value.

    Requires a converged trajectory and at least 10 snapshots inside the
    window; sigma_hat is minus the fitted slope and fit_quality is the
    R-squared of the fit.
    """
    if traj.terminated_by is not TerminationReason.CONVERGED:
        raise ValueError("rate estimation requires a converged trajectory")
    ref = reference.as_array()
    pos = traj.positions()
    if pos.shape[1] != ref.size:
        raise ValueError("reference size does not match trajectory")
    times = traj.times()
    errs = np.max(np.abs(pos - ref[None, :]), axis=1)
    err0 = errs[0]
    if err0 <= 0:
        raise InsufficientDecay("trajectory starts at the reference")
    mask = (errs > 0) & (errs <= 1e-3 * err0) & (errs >= 1e-9 * err0)
    if int(mask.sum()) < 10:
        raise InsufficientDecay(
            f"only {int(mask.sum())} snapshots in the decay window"
        )
    tw = times[mask]
    yw = np.log(errs[mask])
    slope, intercept = np.polyfit(tw, yw, 1)
    fitted = slope * tw + intercept
    ss_res = float(np.sum((yw - fitted) ** 2))
    ss_tot = float(np.sum((yw - yw.mean()) ** 2))
    quality = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    n = ref.size
    return RateReport(
        sigma_hat=float(-slope),
        theoretical_gap=eigenvalue_gap(traj.spec, n),
        fit_window=(float(tw.min()), float(tw.max())),
        fit_quality=quality,
    )


def recommended_stride(n: int) -> int:
    """Every accepted step for small systems, every 10th for larger ones."""
    return 1 if n <= 10 else 10


def convergence_options(
    n: int, t_max: float, residual_tol: float = 1e-9
) -> FlowOptions:
    """Options for runs meant to terminate by residual.

    The numeric flow cannot settle below the per-step error tolerance, so
    the step-control tolerances are tied two orders of magnitude below the
    termination tolerance (never looser than the defaults).
    """
    return FlowOptions(
        t_max=t_max,
        residual_tol=residual_tol,
        snapshot_stride=recommended_stride(n),
        rel_tol=min(1e-8, max(1e-13, 1e-2 * residual_tol)),
        abs_tol=min(1e-10, max(1e-15, 1e-3 * residual_tol)),
    )


def default_init(
    spec: EquationSpec,
    n: int,
    strategy: InitStrategy | str = InitStrategy.EQUISPACED,
    seed: int | None = None,
) -> Configuration:
    """Deterministic starting configurations.

    equispaced: n points splitting a bounded domain into n+1 equal parts;
    {lower+1, ..., lower+n} on half-lines; integers centered at 0 on the
    real line.
    seeded: uniform draws from the middle tenth of the equispaced span,
    sorted, from a seeded generator.
    indexed: x_i = i (only sensible when the domain contains {1, ..., n}).
    """
    if n < 1:
        raise ValueError("need n >= 1")
    strategy = InitStrategy(strategy)
    lo, hi = spec.domain.lower, spec.domain.upper

    if strategy is InitStrategy.INDEXED:
        pts = np.arange(1.0, n + 1.0)
        if not (np.all(pts > lo) and np.all(pts < hi)):
            raise ValueError("indexed start {1..n} leaves the domain")
        return Configuration(tuple(pts))

    bounded = math.isfinite(lo) and math.isfinite(hi)
    if bounded:
        center, span = 0.5 * (lo + hi), hi - lo
    elif math.isfinite(lo):
        center, span = lo + 0.5 * (n + 1.0), n + 1.0
    elif math.isfinite(hi):
        center, span = hi - 0.5 * (n + 1.0), n + 1.0
    else:
        center, span = 0.0, max(float(n + 1), 1.0)

    if strategy is InitStrategy.EQUISPACED:
        if bounded:
            pts = lo + span * np.arange(1.0, n + 1.0) / (n + 1.0)
        elif math.isfinite(lo):
            pts = lo + np.arange(1.0, n + 1.0)
        elif math.isfinite(hi):
            pts = hi - np.arange(float(n), 0.0, -1.0)
        else:
            pts = np.arange(n, dtype=float) - (n - 1) / 2.0
        return Configuration(tuple(pts))

    if seed is None:
        raise ValueError("seeded initialization requires a seed")
    rng = np.random.default_rng(seed)
    half = span / 20.0
    pts = np.sort(rng.uniform(center - half, center + half, size=n))
    return Configuration(tuple(pts))

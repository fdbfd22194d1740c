"""Electrostatic residual, Newton solver, equivalence check, and the
logarithmic pair energy for weights on (-1, 1).

The residual of a configuration {x_1 < ... < x_n} is

    R_i = p(x_i) * sum_{k != i} 2 / (x_i - x_k) + p'(x_i) - q(x_i)

and vanishes exactly when prod_k (x - x_k) is an eigenfunction of
-(p y')' + q y'.  For p = 1 - x^2 and q = (a+b) x + (a-b) the residual is
-2 p(x_i) times the gradient of the energy

    E = - sum_{i<j} log|x_i - x_j|
        - sum_i [ (a+1)/2 * log|x_i - 1| + (b+1)/2 * log|x_i + 1| ]

so equilibria of R coincide with stationary points of E.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import MaxIterExceeded, PointOnBoundary, SingularJacobian
from .operator_core import EquationSpec, eigenvalue, operator_matrix

__all__ = [
    "Configuration",
    "EquilibriumReport",
    "residual",
    "residual_jacobian",
    "newton_solve",
    "verify_theorem1",
    "stieltjes_energy",
    "stieltjes_gradient",
]


@dataclass(frozen=True)
class Configuration:
    """A strictly increasing tuple of particle positions.

    Ordering (which also excludes duplicates) is enforced at construction;
    membership in a spec's domain is checked by the operations that take a
    spec, since the domain is not part of this value.
    """

    points: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(x) for x in self.points)
        if len(pts) < 1:
            raise ValueError("a configuration needs at least one point")
        if not all(np.isfinite(pts)):
            raise ValueError("configuration points must be finite")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("configuration points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def of(cls, xs: Iterable[float]) -> "Configuration":
        return cls(tuple(xs))

    @property
    def n(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=float)


@dataclass(frozen=True)
class EquilibriumReport:
    residual_norm: float
    lambda_recovered: float
    operator_defect: float
    is_equilibrium: bool


def _require_in_domain(spec: EquationSpec, x: np.ndarray) -> None:
    if not (np.all(x > spec.domain.lower) and np.all(x < spec.domain.upper)):
        raise ValueError(
            f"configuration leaves the open domain "
            f"({spec.domain.lower:g}, {spec.domain.upper:g})"
        )


def _interaction_sums(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(sum_{k!=i} 2/(x_i-x_k), sum_{k!=i} 2/(x_i-x_k)^2) for each i."""
    n = x.size
    if n == 1:
        return np.zeros(1), np.zeros(1)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    inv = 1.0 / diff
    np.fill_diagonal(inv, 0.0)
    return 2.0 * inv.sum(axis=1), 2.0 * (inv * inv).sum(axis=1)


def _residual_array(spec: EquationSpec, x: np.ndarray) -> np.ndarray:
    s, _ = _interaction_sums(x)
    return spec.p(x) * s + spec.dp(x) - spec.q(x)


def residual(spec: EquationSpec, config: Configuration) -> np.ndarray:
    """R_i = p(x_i) * sum_{k!=i} 2/(x_i-x_k) + p'(x_i) - q(x_i), i = 1..n."""
    x = config.as_array()
    _require_in_domain(spec, x)
    return _residual_array(spec, x)


def residual_jacobian(spec: EquationSpec, config: Configuration) -> np.ndarray:
    """Closed-form partial derivatives dR_i/dx_j.

    Diagonal: p'(x_i)*S_i - p(x_i)*T_i + p''(x_i) - q'(x_i) with
    S_i = sum 2/(x_i-x_k) and T_i = sum 2/(x_i-x_k)^2.
    Off-diagonal (j != i): p(x_i) * 2/(x_i-x_j)^2.
    """
    x = config.as_array()
    _require_in_domain(spec, x)
    n = x.size
    s, t = _interaction_sums(x)
    if n == 1:
        off = np.zeros((1, 1))
    else:
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, 1.0)
        off = spec.p(x)[:, None] * (2.0 / (diff * diff))
    J = off
    J[np.arange(n), np.arange(n)] = (
        spec.dp(x) * s - spec.p(x) * t + spec.ddp() - spec.dq()
    )
    return J


def newton_solve(
    spec: EquationSpec,
    start: Configuration,
    tol: float,
    max_iter: int = 100,
) -> Configuration:
    """Damped Newton iteration on R(x) = 0.

    Full Newton steps are halved (up to 40 times) until the trial iterate is
    strictly increasing and inside the domain; no other globalization.
    Raises MaxIterExceeded (carrying the last iterate and its residual norm)
    or SingularJacobian.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    x = start.as_array()
    _require_in_domain(spec, x)
    lo, hi = spec.domain.lower, spec.domain.upper

    def valid(y: np.ndarray) -> bool:
        return (
            bool(np.all(np.diff(y) > 0.0))
            and bool(np.all(y > lo))
            and bool(np.all(y < hi))
            and bool(np.all(np.isfinite(y)))
        )

    for _ in range(max_iter):
        r = _residual_array(spec, x)
        rnorm = float(np.max(np.abs(r)))
        if rnorm < tol:
            return Configuration(tuple(x))
        J = residual_jacobian(spec, Configuration(tuple(x)))
        try:
            delta = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(
                f"singular Jacobian at residual norm {rnorm:.3e}"
            ) from exc
        step = 1.0
        for _ in range(40):
            trial = x + step * delta
            if valid(trial):
                break
            step *= 0.5
        else:
            raise MaxIterExceeded(
                Configuration(tuple(x)), rnorm, "step damping exhausted"
            )
        x = trial

    r = _residual_array(spec, x)
    rnorm = float(np.max(np.abs(r)))
    if rnorm < tol:
        return Configuration(tuple(x))
    raise MaxIterExceeded(Configuration(tuple(x)), rnorm)


def monic_from_roots(points: Sequence[float]) -> np.ndarray:
    """Ascending coefficients of prod_k (x - x_k); leading coefficient 1."""
    c = np.array([1.0])
    for r in points:
        c = np.concatenate(([0.0], c)) - float(r) * np.concatenate((c, [0.0]))
    return c


def verify_theorem1(
    spec: EquationSpec, config: Configuration, tol: float
) -> EquilibriumReport:
    """Check both sides of the equilibrium <-> eigenfunction equivalence.

    Expands the monic polynomial with the given roots, applies the operator
    matrix, and reports both the relative operator defect
    ||M c - lambda_n c|| / ||c|| and the residual max-norm.  lambda is not
    fitted: for a monic candidate the leading coefficient forces
    lambda = eigenvalue(spec, n).
    """
    x = config.as_array()
    _require_in_domain(spec, x)
    n = config.n
    c = monic_from_roots(x)
    M = operator_matrix(spec, n)
    lam = eigenvalue(spec, n)
    defect = float(
        np.linalg.norm(M.entries @ c - lam * c) / np.linalg.norm(c)
    )
    rnorm = float(np.max(np.abs(_residual_array(spec, x))))
    return EquilibriumReport(
        residual_norm=rnorm,
        lambda_recovered=lam,
        operator_defect=defect,
        is_equilibrium=bool(rnorm < tol),
    )


def _check_energy_args(alpha: float, beta: float, x: np.ndarray) -> None:
    if not (alpha > -1 and beta > -1):
        raise ValueError("energy requires alpha > -1 and beta > -1")
    if np.any(np.abs(x) >= 1.0):
        raise PointOnBoundary(
            "all points must lie strictly inside (-1, 1)"
        )


def stieltjes_energy(alpha: float, beta: float, config: Configuration) -> float:
    """Logarithmic pair energy plus endpoint fields on (-1, 1).

    E = - sum_{i<j} log|x_i - x_j|
        - sum_i [ (alpha+1)/2 log|x_i - 1| + (beta+1)/2 log|x_i + 1| ]

    The pair sum runs over unordered pairs; its stationarity condition is

        sum_{k != i} 1/(x_k - x_i)
            = (alpha+1)/(2(x_i - 1)) + (beta+1)/(2(x_i + 1)).
    """
    x = config.as_array()
    _check_energy_args(alpha, beta, x)
    pair = 0.0
    if x.size > 1:
        diff = x[:, None] - x[None, :]
        iu = np.triu_indices(x.size, k=1)
        pair = -float(np.sum(np.log(np.abs(diff[iu]))))
    field = -float(
        np.sum(
            0.5 * (alpha + 1.0) * np.log(np.abs(x - 1.0))
            + 0.5 * (beta + 1.0) * np.log(np.abs(x + 1.0))
        )
    )
    return pair + field


def stieltjes_gradient(
    alpha: float, beta: float, config: Configuration
) -> np.ndarray:
    """Exact partial derivatives of the energy above.

    dE/dx_i = - sum_{k != i} 1/(x_i - x_k)
              - (alpha+1)/(2(x_i - 1)) - (beta+1)/(2(x_i + 1))
    """
    x = config.as_array()
    _check_energy_args(alpha, beta, x)
    s, _ = _interaction_sums(x)
    return (
        -0.5 * s
        - 0.5 * (alpha + 1.0) / (x - 1.0)
        - 0.5 * (beta + 1.0) / (x + 1.0)
    )

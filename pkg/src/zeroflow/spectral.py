"""Independent spectral route to eigenpolynomial zeros.

Because the operator matrix is upper triangular with the eigenvalues on the
diagonal, the monic eigenvector for lambda_n follows from plain
back-substitution; its real roots are then isolated by sign changes on a
refining grid and polished by bisection plus Newton steps.  heat_propagate
evolves arbitrary polynomial coefficients exactly under exp(t M) through the
eigenbasis, with no time stepping.

Precision note: monomial coefficients of high-degree polynomials whose roots
fill an interval are catastrophically ill-conditioned as a root
representation (root sensitivity grows roughly like 2^n times machine
epsilon).  Double precision therefore supports the oracle only to small
degrees; beyond F64_ORACLE_LIMIT, oracle_zeros runs the identical
back-substitution and bracketing algorithm in software extended precision
and rounds only the final roots, which are perfectly conditioned as points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import mpmath as mp
import numpy as np

from .equilibrium import Configuration, monic_from_roots
from .errors import (
    DegenerateSpectrumError,
    PropagatorOverflow,
    RootCountMismatch,
    ZeroflowError,
)
from .operator_core import (
    Domain,
    EquationSpec,
    check_simple_spectrum,
    eigenvalue,
    operator_matrix,
)

__all__ = [
    "PolynomialCoefficients",
    "eigen_coefficients",
    "poly_roots",
    "oracle_zeros",
    "heat_propagate",
    "eigenbasis_matrix",
    "F64_ORACLE_LIMIT",
]

# Largest degree at which the double-precision pipeline still delivers roots
# below ~2e-11 absolute error for every classical family (measured against
# extended precision and recurrence-based nodes; the worst case is the
# Laguerre domain, whose large roots amplify evaluation cancellation).
F64_ORACLE_LIMIT = 12

_BISECT_WIDTH = 1e-10
_MAX_GRID = 2**22


@dataclass(frozen=True)
class PolynomialCoefficients:
    """Real polynomial in the monomial basis, ascending degree order.

    The leading coefficient must be nonzero; monic variants carry a leading
    coefficient of exactly 1.
    """

    coeffs: tuple[float, ...]

    def __post_init__(self):
        cs = tuple(float(c) for c in self.coeffs)
        if len(cs) < 1:
            raise ValueError("need at least one coefficient")
        if not all(math.isfinite(c) for c in cs):
            raise ValueError("coefficients must be finite")
        if cs[-1] == 0.0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def of(cls, cs: Iterable[float]) -> "PolynomialCoefficients":
        return cls(tuple(cs))

    @classmethod
    def from_roots(cls, roots: Iterable[float]) -> "PolynomialCoefficients":
        return cls(tuple(monic_from_roots(tuple(roots))))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_monic(self) -> bool:
        return self.coeffs[-1] == 1.0

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=float)

    def __call__(self, x):
        """Horner evaluation; accepts scalars or arrays."""
        c = self.coeffs
        acc = np.full_like(np.asarray(x, dtype=float), c[-1])
        for a in reversed(c[:-1]):
            acc = acc * x + a
        return acc


def _require_simple(spec: EquationSpec, n: int) -> None:
    defect = check_simple_spectrum(spec, n)
    if defect is not None:
        raise DegenerateSpectrumError(
            defect.j, defect.k, defect.lambda_j, defect.lambda_k
        )


def eigen_coefficients(spec: EquationSpec, n: int) -> PolynomialCoefficients:
    """Monic eigenvector of the operator matrix for lambda_n.

    With M upper triangular, set c_n = 1 and solve upward:

        c_j = sum_{m > j} M[j][m] c_m / (lambda_n - lambda_j)

    Requires a simple increasing spectrum up to n.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    _require_simple(spec, n)
    M = operator_matrix(spec, n).entries
    lam_n = eigenvalue(spec, n)
    c = np.zeros(n + 1)
    c[n] = 1.0
    for j in range(n - 1, -1, -1):
        c[j] = (M[j, j + 1 :] @ c[j + 1 :]) / (lam_n - M[j, j])
    return PolynomialCoefficients(tuple(c))


def _samuelson_interval(c: np.ndarray) -> tuple[float, float]:
    """Interval containing all roots of a real-rooted polynomial, from the
    first two power sums of the roots (Samuelson's inequality).  For inputs
    that are not real-rooted the interval is merely heuristic, but those
    inputs fail root isolation anyway.
    """
    n = len(c) - 1
    s1 = -c[n - 1] / c[n]
    e2 = c[n - 2] / c[n] if n >= 2 else 0.0
    p2 = s1 * s1 - 2.0 * e2
    mean = s1 / n
    var = max(p2 / n - mean * mean, 0.0)
    half = math.sqrt((n - 1) * var) if n > 1 else 0.0
    return mean - half, mean + half


def _cos_grid(lo: float, hi: float, m: int) -> np.ndarray:
    """m+1 points clustering at both ends, matching how zeros of the
    eigenpolynomials accumulate near interval endpoints."""
    theta = np.linspace(0.0, math.pi, m + 1)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(theta)[::-1]


def poly_roots(coeffs: PolynomialCoefficients, domain: Domain) -> Configuration:
    """Isolate all real roots of a polynomial expected to be real-rooted.

    Sign changes are bracketed on a refining grid bounded by the Cauchy
    bound 1 + max|c_i / c_n| (tightened by Samuelson's inequality and
    clipped to the domain's finite endpoints, since the roots of interest
    lie there); each bracket is bisected to width 1e-10 and polished by
    Newton steps to near machine precision.

    Raises RootCountMismatch when the number of isolated real roots differs
    from the degree, which signals complex roots or numerical breakdown.
    Domain membership of the returned points is not enforced here.
    """
    c = coeffs.as_array()
    n = coeffs.degree
    if n < 1:
        raise ValueError("root isolation needs degree >= 1")
    if n > 60:
        # rescaling cannot fix monomial-basis conditioning, but it avoids
        # overflow of Horner intermediates for badly scaled coefficients
        c = c / np.max(np.abs(c))
    if n == 1:
        return Configuration((-c[0] / c[1] + 0.0,))

    cauchy = 1.0 + np.max(np.abs(c[:-1])) / abs(c[-1])
    slo, shi = _samuelson_interval(c)
    lo = max(-cauchy, slo, domain.lower)
    hi = min(cauchy, shi, domain.upper)
    if not lo < hi:
        lo, hi = -cauchy, cauchy
    lo -= 1e-9 * (1.0 + abs(lo))
    hi += 1e-9 * (1.0 + abs(hi))

    dc = c[1:] * np.arange(1, n + 1)

    def pv(x):
        return np.polynomial.polynomial.polyval(x, c)

    def dpv(x):
        return np.polynomial.polynomial.polyval(x, dc)

    m = max(64, 8 * n)
    while True:
        xs = _cos_grid(lo, hi, m)
        vals = pv(xs)
        if not np.all(np.isfinite(vals)):
            raise RootCountMismatch(n, 0, "overflow while evaluating on grid")
        sgn = np.sign(vals)
        exact = xs[sgn == 0.0]
        # bracket only adjacent cells with opposite nonzero signs; cells
        # touching an exact zero are accounted for by the zero itself
        flip = np.nonzero((sgn[:-1] != 0) & (sgn[1:] != 0) & (sgn[:-1] != sgn[1:]))[0]
        count = len(exact) + len(flip)
        if count == n:
            break
        if m >= _MAX_GRID or count > n:
            raise RootCountMismatch(n, int(count), f"grid of {m} cells")
        m *= 2

    a, b = xs[flip], xs[flip + 1]
    fa = pv(a)
    for _ in range(200):  # width halves per pass; 200 covers any double range
        if np.all(b - a <= _BISECT_WIDTH):
            break
        mid = 0.5 * (a + b)
        if np.all((mid <= a) | (mid >= b)):
            break
        fm = pv(mid)
        left = fa * fm > 0
        a = np.where(left, mid, a)
        fa = np.where(left, fm, fa)
        b = np.where(left, b, mid)
    a0, b0 = a.copy(), b.copy()

    x = 0.5 * (a + b)
    for _ in range(30):
        d = dpv(x)
        d = np.where(d == 0.0, 1.0, d)
        dx = pv(x) / d
        x = np.clip(x - dx, a0, b0)
        if np.all(np.abs(dx) <= 4.0 * np.finfo(float).eps * (1.0 + np.abs(x))):
            break

    roots = np.sort(np.concatenate((x, exact)))
    if len(roots) != n or np.any(np.diff(roots) <= 0.0):
        raise RootCountMismatch(n, len(np.unique(roots)), "roots merged")
    return Configuration(tuple(roots))


def _mp_dps(n: int) -> int:
    return 30 + int(math.ceil(0.45 * n))


def _oracle_zeros_mp(spec: EquationSpec, n: int) -> Configuration:
    """Back-substitution and root bracketing in extended precision.

    Same algorithm as eigen_coefficients + poly_roots; only the arithmetic
    carries enough digits to absorb the monomial-basis conditioning loss
    (about 0.3 n decimal digits).
    """
    with mp.workdps(_mp_dps(n)):
        q0, p1, p0 = mp.mpf(spec.q0), mp.mpf(spec.p1), mp.mpf(spec.p0)
        lam = [mp.mpf(spec.q1) * m - mp.mpf(spec.p2) * m * (m + 1) for m in range(n + 1)]
        c = [mp.mpf(0)] * (n + 1)
        c[n] = mp.mpf(1)
        for j in range(n - 1, -1, -1):
            s = mp.mpf(0)
            if j + 1 <= n:
                s += (j + 1) * (q0 - p1 * (j + 1)) * c[j + 1]
            if j + 2 <= n:
                s += -p0 * (j + 2) * (j + 1) * c[j + 2]
            c[j] = s / (lam[n] - lam[j])

        crev = list(reversed(c))
        dcrev = [crev[i] * (n - i) for i in range(n)]

        def pv(x):
            acc = crev[0]
            for a in crev[1:]:
                acc = acc * x + a
            return acc

        def dpv(x):
            acc = dcrev[0]
            for a in dcrev[1:]:
                acc = acc * x + a
            return acc

        s1 = -c[n - 1]
        e2 = c[n - 2] if n >= 2 else mp.mpf(0)
        mean = s1 / n
        var = max(s1 * s1 - 2 * e2, mp.mpf(0)) / n - mean * mean
        half = mp.sqrt((n - 1) * max(var, mp.mpf(0))) if n > 1 else mp.mpf(0)
        lo = float(mean - half)
        hi = float(mean + half)
        lo = max(lo, spec.domain.lower)
        hi = min(hi, spec.domain.upper)
        if not lo < hi:
            raise RootCountMismatch(n, 0, "empty bracket interval")
        lo -= 1e-9 * (1.0 + abs(lo))
        hi += 1e-9 * (1.0 + abs(hi))

        m = max(64, 4 * n)
        while True:
            xs = _cos_grid(lo, hi, m)
            vals = [pv(mp.mpf(float(t))) for t in xs]
            sgn = [mp.sign(v) for v in vals]
            exact = [xs[i] for i in range(m + 1) if sgn[i] == 0]
            brackets = [
                (xs[i], xs[i + 1])
                for i in range(m)
                if sgn[i] != 0 and sgn[i + 1] != 0 and sgn[i] != sgn[i + 1]
            ]
            count = len(exact) + len(brackets)
            if count == n:
                break
            if m >= 2**20 or count > n:
                raise RootCountMismatch(n, int(count), f"grid of {m} cells")
            m *= 2

        newton_tol = mp.mpf(10) ** (-(_mp_dps(n) - 6))
        roots = [float(z) for z in exact]
        for a, b in brackets:
            a, b = mp.mpf(float(a)), mp.mpf(float(b))
            fa = pv(a)
            for _ in range(14):
                mid = 0.5 * (a + b)
                fm = pv(mid)
                if fm == 0:
                    a = b = mid
                    break
                if mp.sign(fm) == mp.sign(fa):
                    a, fa = mid, fm
                else:
                    b = mid
            x = 0.5 * (a + b)
            for _ in range(40):
                f = pv(x)
                if f == 0:
                    break
                dx = f / dpv(x)
                x = x - dx
                if abs(dx) <= newton_tol * (1 + abs(x)):
                    break
            roots.append(float(x))

    roots.sort()
    if any(b <= a for a, b in zip(roots, roots[1:])):
        raise RootCountMismatch(n, len(set(roots)), "roots merged")
    return Configuration(tuple(roots))


@lru_cache(maxsize=256)
def oracle_zeros(spec: EquationSpec, n: int) -> Configuration:
    """Zeros of the degree-n eigenpolynomial, strictly inside the domain.

    Composition of eigen_coefficients and poly_roots, escalating to extended
    precision beyond degree F64_ORACLE_LIMIT (see module docstring).
    """
    if n < 1:
        raise ValueError("oracle_zeros requires n >= 1")
    _require_simple(spec, n)
    if n <= F64_ORACLE_LIMIT:
        config = poly_roots(eigen_coefficients(spec, n), spec.domain)
    else:
        config = _oracle_zeros_mp(spec, n)
    for r in config.points:
        if not spec.domain.contains(r):
            raise ZeroflowError(
                f"eigenpolynomial root {r:g} lies outside the open domain "
                f"({spec.domain.lower:g}, {spec.domain.upper:g})"
            )
    return config


def eigenbasis_matrix(spec: EquationSpec, n: int) -> np.ndarray:
    """Unit upper triangular matrix whose column k holds the monic degree-k
    eigenpolynomial's coefficients (ascending, zero padded)."""
    _require_simple(spec, n)
    Y = np.zeros((n + 1, n + 1))
    for k in range(n + 1):
        Y[: k + 1, k] = eigen_coefficients(spec, k).as_array()
    return Y


_EXP_CAP = 700.0


def heat_propagate(
    spec: EquationSpec, coeffs: PolynomialCoefficients, t: float
) -> PolynomialCoefficients:
    """Apply exp(t M) to polynomial coefficients exactly.

    Expands the input in the eigenbasis (triangular solve), scales component
    k by exp(lambda_k t), and maps back.  No time stepping is involved, so
    the result is exact up to round-off.  lambda_n * t is capped at 700 to
    stay within double range.
    """
    if t < 0:
        raise ValueError("propagation time must be nonnegative")
    n = coeffs.degree
    _require_simple(spec, n)
    lam = np.array([eigenvalue(spec, k) for k in range(n + 1)])
    if lam[n] * t > _EXP_CAP:
        raise PropagatorOverflow(
            f"lambda_n * t = {lam[n] * t:.3g} exceeds {_EXP_CAP:g}"
        )
    Y = eigenbasis_matrix(spec, n)
    a = np.linalg.solve(Y, coeffs.as_array())
    out = Y @ (a * np.exp(lam * t))
    return PolynomialCoefficients(tuple(out))

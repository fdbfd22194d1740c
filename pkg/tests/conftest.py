import numpy as np
import pytest

from zeroflow import ClassicalFamily, make_classical

# representative parameter choices for the parametric families
CLASSICAL = [
    ("hermite", ClassicalFamily.hermite()),
    ("legendre", ClassicalFamily.legendre()),
    ("jacobi(0.3,1.2)", ClassicalFamily.jacobi(0.3, 1.2)),
    ("laguerre(0)", ClassicalFamily.laguerre(0.0)),
    ("laguerre(0.7)", ClassicalFamily.laguerre(0.7)),
    ("chebyshev1", ClassicalFamily.chebyshev_first()),
    ("chebyshev2", ClassicalFamily.chebyshev_second()),
]

CLASSICAL_SPECS = [(name, make_classical(fam)) for name, fam in CLASSICAL]


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_config(rng, spec, n, min_gap=0.05):
    """Sorted points inside the domain with a guaranteed minimum gap."""
    lo, hi = spec.domain.lower, spec.domain.upper
    if not np.isfinite(lo):
        lo = -3.0 if np.isfinite(hi) else -3.0
    if not np.isfinite(hi):
        hi = lo + max(6.0, 2.0 * n)
    width = hi - lo
    pad = 0.02 * width
    for _ in range(200):
        pts = np.sort(rng.uniform(lo + pad, hi - pad, size=n))
        if n == 1 or np.min(np.diff(pts)) > min_gap * width / max(n, 4):
            return pts
    raise AssertionError("could not draw a well-separated configuration")

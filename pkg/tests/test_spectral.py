import math

import numpy as np
import pytest
import scipy.linalg
import scipy.special

from zeroflow import (
    ClassicalFamily,
    DegenerateSpectrumError,
    Domain,
    EquationSpec,
    PolynomialCoefficients,
    PropagatorOverflow,
    RootCountMismatch,
    eigen_coefficients,
    eigenvalue,
    heat_propagate,
    make_classical,
    operator_matrix,
    oracle_zeros,
    poly_roots,
    residual,
)
from zeroflow.operator_core import REAL_LINE
from zeroflow.spectral import F64_ORACLE_LIMIT, _oracle_zeros_mp, eigenbasis_matrix
from conftest import CLASSICAL_SPECS

LAG = make_classical(ClassicalFamily.laguerre(0.0))
LEG = make_classical(ClassicalFamily.legendre())
HER = make_classical(ClassicalFamily.hermite())

# frozen reference values, computed independently to 30 digits
L3_ZEROS = (0.41577455678347908, 2.2942803602790417, 6.2899450829374792)
INV_SQRT3 = 0.57735026918962576


def scipy_nodes(name, n):
    """Golub-Welsch style nodes as an independent cross-check oracle."""
    if name.startswith("hermite"):
        return np.sort(scipy.special.roots_hermitenorm(n)[0])
    if name.startswith("legendre"):
        return np.sort(scipy.special.roots_legendre(n)[0])
    if name.startswith("jacobi"):
        return np.sort(scipy.special.roots_jacobi(n, 0.3, 1.2)[0])
    if name == "laguerre(0)":
        return np.sort(scipy.special.roots_laguerre(n)[0])
    if name == "laguerre(0.7)":
        return np.sort(scipy.special.roots_genlaguerre(n, 0.7)[0])
    if name == "chebyshev1":
        return np.sort(scipy.special.roots_chebyt(n)[0])
    if name == "chebyshev2":
        return np.sort(scipy.special.roots_chebyu(n)[0])
    raise KeyError(name)


class TestEigenCoefficients:
    def test_laguerre3_closed_form(self):
        assert eigen_coefficients(LAG, 3).coeffs == (-6.0, 18.0, -9.0, 1.0)

    def test_hermite2(self):
        assert eigen_coefficients(HER, 2).coeffs == (-1.0, 0.0, 1.0)

    def test_legendre2_proportional_to_p2(self):
        c = eigen_coefficients(LEG, 2).as_array()
        np.testing.assert_allclose(c, [-1.0 / 3.0, 0.0, 1.0], rtol=1e-15)

    def test_chebyshev2_monic_forms(self):
        t = make_classical(ClassicalFamily.chebyshev_first())
        u = make_classical(ClassicalFamily.chebyshev_second())
        np.testing.assert_allclose(
            eigen_coefficients(t, 2).as_array(), [-0.5, 0.0, 1.0], rtol=1e-15
        )
        np.testing.assert_allclose(
            eigen_coefficients(u, 2).as_array(), [-0.25, 0.0, 1.0], rtol=1e-15
        )

    def test_degree_zero(self):
        assert eigen_coefficients(LEG, 0).coeffs == (1.0,)

    @pytest.mark.parametrize("name,spec", CLASSICAL_SPECS)
    def test_eigen_defect_below_1e12(self, name, spec):
        for n in range(0, 51):
            c = eigen_coefficients(spec, n).as_array()
            M = operator_matrix(spec, n).entries
            defect = np.linalg.norm(M @ c - eigenvalue(spec, n) * c) / np.linalg.norm(c)
            assert defect < 1e-12, (name, n, defect)

    def test_degenerate_spectrum_refused(self):
        spec = EquationSpec(0.0, 0.0, 1.0, 0.0, 0.0, Domain(-1, 1))
        with pytest.raises(DegenerateSpectrumError):
            eigen_coefficients(spec, 3)


class TestPolyRoots:
    def test_laguerre3_values(self):
        cfg = poly_roots(PolynomialCoefficients((-6.0, 18.0, -9.0, 1.0)), LAG.domain)
        np.testing.assert_allclose(cfg.points, L3_ZEROS, atol=1e-12)

    def test_four_decimal_reference_values(self):
        cfg = poly_roots(PolynomialCoefficients((-6.0, 18.0, -9.0, 1.0)), LAG.domain)
        for got, printed in zip(cfg.points, (0.4157, 2.2942, 6.2899)):
            assert abs(got - printed) < 1e-4

    def test_x_squared_minus_one(self):
        cfg = poly_roots(PolynomialCoefficients((-1.0, 0.0, 1.0)), REAL_LINE)
        np.testing.assert_allclose(cfg.points, [-1.0, 1.0], atol=1e-14)

    def test_monic_linear(self):
        cfg = poly_roots(PolynomialCoefficients((0.0, 1.0)), REAL_LINE)
        assert cfg.points == (0.0,)

    def test_no_real_roots(self):
        with pytest.raises(RootCountMismatch):
            poly_roots(PolynomialCoefficients((1.0, 0.0, 1.0)), REAL_LINE)

    def test_partial_real_roots(self):
        # (x^2 + 100)(x - 0.5): one real root out of three
        with pytest.raises(RootCountMismatch):
            poly_roots(
                PolynomialCoefficients((-50.0, 100.0, -0.5, 1.0)), REAL_LINE
            )

    def test_random_well_separated_roots(self, rng):
        for _ in range(25):
            n = int(rng.integers(1, 9))
            roots = np.sort(rng.uniform(-4, 4, size=n))
            while n > 1 and np.min(np.diff(roots)) < 0.05:
                roots = np.sort(rng.uniform(-4, 4, size=n))
            cfg = poly_roots(PolynomialCoefficients.from_roots(roots), REAL_LINE)
            np.testing.assert_allclose(cfg.points, roots, atol=1e-9)

    def test_root_exactly_on_grid_point(self):
        # symmetric cubic has a root at 0, which cosine grids hit exactly
        cfg = poly_roots(PolynomialCoefficients.from_roots((-1.0, 0.0, 1.0)), REAL_LINE)
        np.testing.assert_allclose(cfg.points, [-1.0, 0.0, 1.0], atol=1e-13)


class TestOracleZeros:
    def test_legendre2_analytic(self):
        cfg = oracle_zeros(LEG, 2)
        np.testing.assert_allclose(cfg.points, [-INV_SQRT3, INV_SQRT3], atol=1e-14)

    def test_hermite1(self):
        assert oracle_zeros(HER, 1).points == (0.0,)

    def test_laguerre3(self):
        np.testing.assert_allclose(oracle_zeros(LAG, 3).points, L3_ZEROS, atol=1e-12)

    @pytest.mark.parametrize("name,spec", CLASSICAL_SPECS)
    def test_against_scipy_nodes_small(self, name, spec):
        # double-precision oracle regime
        for n in range(1, F64_ORACLE_LIMIT + 1):
            got = oracle_zeros(spec, n).as_array()
            np.testing.assert_allclose(
                got, scipy_nodes(name, n), rtol=0, atol=1e-10,
                err_msg=f"{name} n={n}",
            )

    @pytest.mark.parametrize("name,spec", CLASSICAL_SPECS)
    def test_against_scipy_nodes_large(self, name, spec):
        # extended-precision oracle regime
        for n in (16, 35, 60, 100):
            got = oracle_zeros(spec, n).as_array()
            ref = scipy_nodes(name, n)
            scale = 1.0 + np.max(np.abs(ref))
            assert np.max(np.abs(got - ref)) < 1e-12 * scale, (name, n)

    def test_f64_and_mp_paths_agree_at_cutoff(self):
        for _, spec in CLASSICAL_SPECS[:4]:
            n = F64_ORACLE_LIMIT
            f64 = poly_roots(eigen_coefficients(spec, n), spec.domain).as_array()
            mp_ = _oracle_zeros_mp(spec, n).as_array()
            assert np.max(np.abs(f64 - mp_)) < 1e-10 * (1 + np.max(np.abs(mp_)))

    @pytest.mark.parametrize("name,spec", CLASSICAL_SPECS)
    def test_root_count_and_ordering(self, name, spec):
        # root count, strict ordering, and domain membership; degree sampled
        # up to 200 (extended precision beyond the double-precision regime)
        for n in (1, 2, 3, 4, 6, 8, 12, 20, 50, 120, 200):
            cfg = oracle_zeros(spec, n)
            pts = cfg.as_array()
            assert pts.size == n
            assert np.all(np.diff(pts) > 0)
            assert np.all(pts > spec.domain.lower) and np.all(pts < spec.domain.upper)

    @pytest.mark.parametrize("name,spec", CLASSICAL_SPECS)
    def test_cross_validation_residual(self, name, spec):
        # the spectral and electrostatic modules certify each other
        for n in (1, 2, 5, 12, 40, 100):
            cfg = oracle_zeros(spec, n)
            scale = 1.0 + np.max(np.abs(cfg.as_array()))
            rnorm = np.max(np.abs(residual(spec, cfg)))
            assert rnorm < 1e-8 * scale, (name, n, rnorm)

    def test_generic_nonclassical_spec(self):
        # shifted/scaled Laguerre-type operator, still simple spectrum
        spec = EquationSpec(0.0, 0.5, 1.0, 2.0, 1.0, Domain(-2.0, math.inf))
        cfg = oracle_zeros(spec, 6)
        rnorm = np.max(np.abs(residual(spec, cfg)))
        assert rnorm < 1e-9

    def test_requires_positive_degree(self):
        with pytest.raises(ValueError):
            oracle_zeros(LEG, 0)


class TestHeatPropagate:
    def test_t_zero_identity(self):
        c = PolynomialCoefficients((-2.0, 1.0, 1.0))
        out = heat_propagate(HER, c, 0.0)
        np.testing.assert_allclose(out.as_array(), c.as_array(), rtol=1e-14)

    @pytest.mark.parametrize("name,spec", CLASSICAL_SPECS)
    def test_eigenvector_scaling(self, name, spec):
        n, t = 5, 0.07
        c = eigen_coefficients(spec, n)
        out = heat_propagate(spec, c, t)
        np.testing.assert_allclose(
            out.as_array(),
            math.exp(eigenvalue(spec, n) * t) * c.as_array(),
            rtol=1e-10,
            atol=1e-12,
        )

    def test_hermite_example_vs_expm(self):
        # coefficients of (x - 1)(x + 2) = x^2 + x - 2
        c = PolynomialCoefficients((-2.0, 1.0, 1.0))
        t = 0.05
        out = heat_propagate(HER, c, t)
        M = operator_matrix(HER, 2).entries
        expected = scipy.linalg.expm(t * M) @ c.as_array()
        np.testing.assert_allclose(out.as_array(), expected, rtol=1e-12, atol=1e-14)

    @pytest.mark.parametrize("name,spec", CLASSICAL_SPECS)
    def test_random_polys_vs_expm(self, name, spec, rng):
        for _ in range(5):
            n = int(rng.integers(1, 9))
            c = rng.standard_normal(n + 1)
            c[-1] = c[-1] if abs(c[-1]) > 0.1 else 1.0
            t = float(rng.uniform(0.0, 0.2))
            out = heat_propagate(spec, PolynomialCoefficients(tuple(c)), t)
            M = operator_matrix(spec, n).entries
            expected = scipy.linalg.expm(t * M) @ c
            np.testing.assert_allclose(out.as_array(), expected, rtol=1e-9, atol=1e-11)

    @pytest.mark.parametrize("name,spec", CLASSICAL_SPECS)
    def test_semigroup(self, name, spec, rng):
        n = 7
        c = PolynomialCoefficients(tuple(rng.standard_normal(n) ) + (1.0,))
        s, t = 0.03, 0.11
        once = heat_propagate(spec, heat_propagate(spec, c, s), t)
        direct = heat_propagate(spec, c, s + t)
        # relative to the coefficient vector scale (individual coefficients
        # may nearly cancel)
        gap = np.max(np.abs(once.as_array() - direct.as_array()))
        assert gap <= 1e-10 * np.max(np.abs(direct.as_array()))

    def test_degree_preservation(self):
        c = PolynomialCoefficients.from_roots((-0.4, 0.1, 0.5))
        t = 0.3
        out = heat_propagate(LEG, c, t)
        assert out.degree == 3
        assert out.coeffs[-1] == pytest.approx(
            math.exp(eigenvalue(LEG, 3) * t), rel=1e-12
        )

    def test_overflow_guard(self):
        c = eigen_coefficients(LEG, 10)  # lambda_10 = 110
        with pytest.raises(PropagatorOverflow):
            heat_propagate(LEG, c, 7.0)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            heat_propagate(LEG, PolynomialCoefficients((0.0, 1.0)), -0.1)

    def test_degenerate_spectrum_propagates(self):
        spec = EquationSpec(0.0, 0.0, 1.0, 0.0, 0.0, Domain(-1, 1))
        with pytest.raises(DegenerateSpectrumError):
            heat_propagate(spec, PolynomialCoefficients((0.0, 0.0, 1.0)), 0.1)


class TestEigenbasis:
    def test_unit_upper_triangular(self):
        Y = eigenbasis_matrix(LEG, 8)
        np.testing.assert_allclose(np.diag(Y), np.ones(9))
        assert np.all(np.tril(Y, -1) == 0.0)

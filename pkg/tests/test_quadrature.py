import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from weighted_mt.errors import DomainError, NumericError
from weighted_mt.quadrature import (
    QuadratureConfig,
    cell_integrals,
    gauss_legendre,
    integrate_halfline_exp,
    integrate_radial,
)


def test_gauss_legendre_is_exact_for_polynomials():
    x, w = gauss_legendre(6)
    for k in range(12):
        exact = (1 - (-1) ** (k + 1)) / (k + 1)
        assert np.dot(w, x**k) == pytest.approx(exact, abs=1e-14)


def test_cell_integrals_sum_over_cells():
    a = np.array([0.0, 1.0, 2.5])
    b = np.array([1.0, 2.5, 3.0])
    got = cell_integrals(np.sin, a, b, 8)
    assert got == pytest.approx(np.cos(a) - np.cos(b), abs=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-0.9, max_value=4.0), st.floats(min_value=0.1, max_value=3.0))
def test_radial_weight_singular_endpoint(p, R):
    # int_0^R cos(rho) rho^p drho against scipy with the algebraic weight
    got = integrate_radial(np.cos, p, R).value
    oracle = integrate.quad(np.cos, 0.0, R, weight="alg", wvar=(p, 0.0), epsabs=1e-13)[0]
    assert got == pytest.approx(oracle, rel=1e-8, abs=1e-10)


def test_radial_with_kinked_integrand_uses_breakpoints():
    g = lambda r: np.abs(r - 0.3)  # noqa: E731
    got = integrate_radial(g, 1.0, 1.0, breakpoints=[0.3]).value
    oracle = integrate.quad(lambda r: abs(r - 0.3) * r, 0, 1, points=[0.3], epsabs=1e-14)[0]
    assert got == pytest.approx(oracle, rel=1e-10)


def test_halfline_moments():
    # int_0^inf s^k e^{-s} = k!
    for k in range(5):
        got = integrate_halfline_exp(lambda s: s**k, kappa_b=0.5, C=max(1.0, (2 * k) ** k)).value
        assert got == pytest.approx(math.factorial(k), rel=1e-8)


def test_halfline_certified_tail_reported():
    res = integrate_halfline_exp(lambda s: np.exp(0.5 * s), kappa_b=0.5, C=1.0)
    assert res.value == pytest.approx(2.0, rel=1e-8)
    assert res.tail_bound is not None and res.tail_bound < 1e-9


def test_halfline_fixed_truncation_has_no_tail_bound():
    res = integrate_halfline_exp(lambda s: np.ones_like(s), S=5.0)
    assert res.value == pytest.approx(-math.expm1(-5.0), rel=1e-12)
    assert res.tail_bound is None


def test_halfline_errors():
    with pytest.raises(NumericError):
        integrate_halfline_exp(lambda s: s, kappa_b=1.0)
    with pytest.raises(DomainError):
        integrate_halfline_exp(lambda s: s)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_nonfinite_integrand_is_numeric_failure():
    with pytest.raises(NumericError):
        integrate_radial(lambda r: np.full_like(r, np.inf), 0.0, 1.0)


def test_unreachable_tolerance_is_numeric_failure():
    cfg = QuadratureConfig(abs_tol=1e-300, rel_tol=1e-300, max_subdivisions=2)
    with pytest.raises(NumericError) as err:
        integrate_radial(lambda r: np.sin(1.0 / (r + 1e-3)), 0.0, 1.0, cfg)
    assert err.value.estimate is not None


def test_config_validation():
    with pytest.raises(DomainError):
        QuadratureConfig(abs_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureConfig(nodes_per_cell=1)
    with pytest.raises(DomainError):
        integrate_radial(np.cos, -1.0, 1.0)


def test_beta_function_via_radial_weight():
    # int_0^1 (1-r)^2 r^p = B(p+1, 3)
    p = 0.37
    got = integrate_radial(lambda r: (1 - r) ** 2, p, 1.0).value
    assert got == pytest.approx(special.beta(p + 1, 3), rel=1e-12)

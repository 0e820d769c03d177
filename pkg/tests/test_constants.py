import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from weighted_mt.constants import (
    WeightParams,
    angular_mass,
    build_constants,
    corollary24_constant,
    feasibility_scan,
    phi0_norm_closed_form,
    printed_constants,
    splitting_constant,
    theorem12_feasibility,
)
from weighted_mt.errors import DomainError
from weighted_mt.special import angular_mass_closed_form, gamma, lgamma


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-0.95, max_value=12.0))
def test_angular_mass_against_scipy_quad(a):
    oracle = integrate.quad(lambda t: math.sin(t) ** a, 0.0, math.pi, epsabs=1e-13, limit=200)[0]
    assert angular_mass(a) == pytest.approx(oracle, rel=1e-8)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.05, max_value=60.0))
def test_lanczos_gamma(x):
    assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-12)
    assert lgamma(x) == pytest.approx(math.lgamma(x), rel=1e-12, abs=1e-13)


def test_closed_form_angular_mass():
    for a in (0.0, 0.3, 1.0, 4.0):
        oracle = math.sqrt(math.pi) * special.gamma((a + 1) / 2) / special.gamma(a / 2 + 1)
        assert angular_mass_closed_form(a) == pytest.approx(oracle, rel=1e-13)


def test_sharp_constant_examples():
    c = build_constants(WeightParams(0.0, 0.0))
    assert c.a_sharp == pytest.approx(2 * math.pi, rel=1e-12)
    assert printed_constants(WeightParams(0.0, 0.0), c)["a_sharp_printed"] == pytest.approx(4 * math.pi)
    assert build_constants(WeightParams(1.0, 0.0)).a_sharp == pytest.approx(2 * math.sqrt(2), rel=1e-10)


@pytest.mark.parametrize("ab", [(0.0, 0.0), (1.0, 0.0), (0.5, 2.0), (-0.5, 3.0), (3.0, -0.5)])
def test_scaling_factor_relations(ab):
    p = WeightParams(*ab)
    c = build_constants(p)
    assert c.T**p.b_alpha == pytest.approx(c.a_sharp, rel=1e-12)
    assert c.m_beta_ball == pytest.approx(c.c_beta / (2 + p.beta))
    if p.alpha < p.beta:
        assert c.b_alpha_beta == pytest.approx(c.T**p.b_beta, rel=1e-12)
    else:
        assert c.b_alpha_beta is None


def test_corollary_constant_at_one_two():
    # (2+b)^((1+a)(2+b)/((2+a)(1+b))) c_a^((2+b)/((2+a)(1+b))) with c_1 = 2
    assert corollary24_constant(WeightParams(1.0, 2.0)) == pytest.approx(2 ** (20 / 9), rel=1e-12)
    with pytest.raises(DomainError):
        corollary24_constant(WeightParams(1.0, 1.0))


def test_weight_params_validation():
    for bad in ((-1.0, 0.0), (0.0, -1.5), (math.nan, 0.0)):
        with pytest.raises(DomainError):
            WeightParams(*bad)
    with pytest.raises(DomainError):
        WeightParams(0.0, 0.0, sigma=0.0)
    with pytest.raises(DomainError):
        build_constants(WeightParams(0.0, 0.0), c_zero=0.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1e-3, max_value=50.0), st.floats(min_value=-0.9, max_value=8.0))
def test_splitting_constant_at_least_one(sigma, alpha):
    c = splitting_constant(sigma, alpha)
    assert c >= 1.0
    assert c == pytest.approx((1 - (1 + sigma) ** (-1 - alpha)) ** (-1 / (1 + alpha)), rel=1e-10)


def test_splitting_constant_limits():
    assert splitting_constant(math.inf, 1.0) == 1.0
    assert splitting_constant(1e6, 0.0) == pytest.approx(1.0, abs=1e-5)
    for s in (0.0, -0.5):
        with pytest.raises(DomainError):
            splitting_constant(s, 0.0)


def test_feasibility_single_point():
    f = theorem12_feasibility(1.0, 1.0)
    assert not f.feasible
    assert f.gamma_phi0 == pytest.approx(0.96150, abs=5e-6)
    assert f.bound == pytest.approx(math.sqrt(3) / 2, rel=1e-12)
    assert f.growth_ratio > 1


def test_feasibility_default_grid_has_no_feasible_point():
    alphas = [0.2 * k for k in range(26)]
    sigmas = [0.1 * k for k in range(1, 31)]
    assert not any(r.feasible for r in feasibility_scan(alphas, sigmas))


def test_phi0_norm_values():
    assert phi0_norm_closed_form(0.0) == pytest.approx(1.0)
    assert phi0_norm_closed_form(1.0) == pytest.approx(0.96150, abs=5e-6)

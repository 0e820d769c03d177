"""Weight parameters and the closed-form constants built from them.

Notation: alpha is the exponent of the energy weight t^alpha, beta that of
the measure t^beta, sigma the splitting parameter.  ``b_alpha`` is
(2+alpha)/(1+alpha), the growth exponent in exp(a |u|^b_alpha).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .quadrature import QuadratureConfig, integrate_radial
from .special import angular_mass_closed_form


@dataclass(frozen=True)
class WeightParams:
    alpha: float
    beta: float
    sigma: Optional[float] = None

    def __post_init__(self):
        if not (self.alpha > -1.0):
            raise DomainError(f"alpha={self.alpha} must exceed -1")
        if not (self.beta > -1.0):
            raise DomainError(f"beta={self.beta} must exceed -1")
        if self.sigma is not None and not (self.sigma > 0.0):
            raise DomainError(f"sigma={self.sigma} must be positive")

    @property
    def p(self):
        """Energy exponent 2 + alpha."""
        return 2.0 + self.alpha

    @property
    def b_alpha(self):
        return (2.0 + self.alpha) / (1.0 + self.alpha)

    @property
    def b_beta(self):
        return (2.0 + self.beta) / (1.0 + self.beta)


@dataclass(frozen=True)
class ConstantsBundle:
    c_alpha: float
    c_beta: float
    b_alpha: float
    b_beta: float
    a_sharp: float
    T: float
    c_sigma_alpha: Optional[float]
    b_alpha_beta: Optional[float]
    m_beta_ball: float
    c_one: float = 1.0
    c_zero: float = 1.0

    def as_dict(self):
        return asdict(self)


def angular_mass(alpha, tol=1e-12):
    """int_0^pi sin(theta)^alpha dtheta.

    Folded to 2 int_0^{pi/2} and written as (sin t / t)^alpha against the
    weight t^alpha, so the endpoint singularity for alpha < 0 is carried by
    the radial rule.
    """
    if not alpha > -1.0:
        raise DomainError(f"alpha={alpha} must exceed -1")
    cfg = QuadratureConfig(abs_tol=tol, rel_tol=tol)

    def sinc_pow(t):
        return np.sinc(t / math.pi) ** alpha

    res = integrate_radial(sinc_pow, alpha, 0.5 * math.pi, cfg)
    return 2.0 * float(res.value)


def sharp_constant(alpha, beta, c_alpha):
    return (2.0 + beta) * c_alpha ** (1.0 / (1.0 + alpha))


def scaling_factor(alpha, beta, c_alpha):
    """T with ((2+beta)/T)^(2+alpha) c_alpha / (2+beta) = 1."""
    return (2.0 + beta) * (c_alpha / (2.0 + beta)) ** (1.0 / (2.0 + alpha))


def splitting_constant(sigma, alpha):
    """(1 - (1+sigma)^(-1-alpha))^(-1/(1+alpha)); sigma = inf gives 1."""
    if not alpha > -1.0:
        raise DomainError(f"alpha={alpha} must exceed -1")
    if sigma <= -1.0:
        raise DomainError(f"sigma={sigma} must exceed -1")
    if sigma <= 0.0:
        # base 1 - (1+sigma)^(-1-alpha) is <= 0 here
        raise DomainError(f"sigma={sigma}: constant undefined for sigma <= 0")
    if math.isinf(sigma):
        return 1.0
    return (-math.expm1(-(1.0 + alpha) * math.log1p(sigma))) ** (-1.0 / (1.0 + alpha))


def corollary24_constant(params: WeightParams, c_alpha=None):
    """(2+b)^((1+a)(2+b)/((2+a)(1+b))) c_alpha^((2+b)/((2+a)(1+b)))."""
    a, b = params.alpha, params.beta
    if not a < b:
        raise DomainError(f"requires alpha < beta (got alpha={a}, beta={b})")
    if c_alpha is None:
        c_alpha = angular_mass(a)
    den = (2.0 + a) * (1.0 + b)
    return (2.0 + b) ** ((1.0 + a) * (2.0 + b) / den) * c_alpha ** ((2.0 + b) / den)


def build_constants(params: WeightParams, c_zero=1.0, c_one=1.0) -> ConstantsBundle:
    if not c_zero > 0:
        raise DomainError("c_zero must be positive")
    if not c_one > 0:
        raise DomainError("c_one must be positive")
    a, b = params.alpha, params.beta
    c_alpha = angular_mass(a)
    c_beta = angular_mass(b)
    c_sig = splitting_constant(params.sigma, a) if params.sigma is not None else None
    b_ab = corollary24_constant(params, c_alpha) if a < b else None
    return ConstantsBundle(
        c_alpha=c_alpha,
        c_beta=c_beta,
        b_alpha=params.b_alpha,
        b_beta=params.b_beta,
        a_sharp=sharp_constant(a, b, c_alpha),
        T=scaling_factor(a, b, c_alpha),
        c_sigma_alpha=c_sig,
        b_alpha_beta=b_ab,
        m_beta_ball=c_beta / (2.0 + b),
        c_one=float(c_one),
        c_zero=float(c_zero),
    )


def printed_constants(params: WeightParams, consts: ConstantsBundle):
    """The closed forms as typeset in the source (2 sqrt(pi) Gamma/Gamma).

    That expression is twice int_0^pi sin^alpha; the derivation-consistent
    values in ``ConstantsBundle`` use the integral itself.
    """
    c_printed = 2.0 * angular_mass_closed_form(params.alpha)
    a_printed = (2.0 + params.beta) * c_printed ** (1.0 / (1.0 + params.alpha))
    return {
        "c_alpha_printed": c_printed,
        "a_sharp_printed": a_printed,
        "printed_over_derived": a_printed / consts.a_sharp,
    }


@dataclass(frozen=True)
class Feasibility:
    alpha: float
    sigma: float
    gamma_phi0: float
    bound: float
    growth_ratio: float
    feasible: bool


def phi0_norm_closed_form(alpha):
    """Closed form ((1+a)/(2+a))^((1+a)/(2+a)) 2^(1/(2+a)) of the test profile."""
    r = (1.0 + alpha) / (2.0 + alpha)
    return r**r * 2.0 ** (1.0 / (2.0 + alpha))


def theorem12_feasibility(alpha, sigma) -> Feasibility:
    c = splitting_constant(sigma, alpha)
    gamma = phi0_norm_closed_form(alpha)
    bound = 1.0 / c
    ratio = (1.0 + sigma) / c
    return Feasibility(alpha, sigma, gamma, bound, ratio, bool(gamma <= bound and ratio < 1.0))


def feasibility_scan(alphas, sigmas):
    return [theorem12_feasibility(a, s) for a in alphas for s in sigmas]

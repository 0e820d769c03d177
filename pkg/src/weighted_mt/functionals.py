"""Energies and exponential functionals of radial / half-line profiles.

Every functional has a ball form (quadrature in rho against rho^(1+beta))
and, where it makes sense, a half-line form (quadrature against e^{-s}, with
the plateau beyond S integrated in closed form).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .constants import ConstantsBundle, WeightParams
from .errors import DomainError, ExponentOverflowError
from .profiles import HalfLineProfile, RadialProfile
from .quadrature import DEFAULT_CONFIG, integrate_halfline_exp, integrate_radial

OVERFLOW_GUARD = 700.0


def _guard(peak, where):
    if peak > OVERFLOW_GUARD:
        raise ExponentOverflowError(peak, where)


# ------------------------------------------------------------------ energy


def dirichlet_energy(u, params: WeightParams, consts: ConstantsBundle) -> float:
    """Weighted (2+alpha)-energy, exact for piecewise-linear profiles."""
    p = params.p
    if isinstance(u, HalfLineProfile):
        return float(np.sum(np.abs(u.slopes) ** p * np.diff(u.grid)))
    r = u.grid
    cell = (r[1:] ** p - r[:-1] ** p) / p
    return float(consts.c_alpha * np.sum(np.abs(u.slopes) ** p * cell))


def energy_within(u: RadialProfile, r_max, params, consts) -> float:
    """Energy of u restricted to the ball of radius r_max."""
    r = np.minimum(u.grid, r_max)
    p = params.p
    cell = (r[1:] ** p - r[:-1] ** p) / p
    return float(consts.c_alpha * np.sum(np.abs(u.slopes) ** p * cell))


def energy_outside(u: RadialProfile, delta, params, consts) -> float:
    """Energy of u on the annulus delta < rho < R."""
    r = np.maximum(u.grid, delta)
    p = params.p
    cell = (r[1:] ** p - r[:-1] ** p) / p
    return float(consts.c_alpha * np.sum(np.abs(u.slopes) ** p * cell))


def halfline_energy_upto(f: HalfLineProfile, s_max, params) -> float:
    """Energy of f on [0, s_max]; zero slope beyond S."""
    s = np.minimum(f.grid, s_max)
    return float(np.sum(np.abs(f.slopes) ** params.p * np.diff(s)))


# ------------------------------------------------------- exponential integrals


def mt_integral_ball(u: RadialProfile, a, params, consts, cfg=DEFAULT_CONFIG, exponent=None, R=None):
    """c_beta int_0^R (e^{a u^b} - 1) rho^(1+beta) drho (b = b_alpha unless given)."""
    if not a > 0:
        raise DomainError("a must be positive")
    b = params.b_alpha if exponent is None else exponent
    R = u.R if R is None else R
    peak = a * float(u.values.max()) ** b
    _guard(peak, "exp(a u^b)")

    def g(rho):
        return np.expm1(a * u(rho) ** b)

    res = integrate_radial(g, 1.0 + params.beta, R, cfg, breakpoints=u.grid)
    return consts.c_beta * res.value


def halfline_exp_integral(f: HalfLineProfile, kappa, b, cfg=DEFAULT_CONFIG):
    """int_0^inf (e^{kappa f^b} - 1) e^{-s} ds with the plateau tail in closed form.

    Returns (value, error estimate)."""
    peak = kappa * f.plateau**b
    _guard(max(peak, kappa * float(f.values.max()) ** b), "exp(kappa f^b)")

    def g(s):
        return np.expm1(kappa * f(s) ** b)

    res = integrate_halfline_exp(g, S=f.S, cfg=cfg, breakpoints=f.grid)
    tail = math.expm1(peak) * math.exp(-f.S)
    return res.value + tail, res.error


def mt_integral_halfline(v: HalfLineProfile, a, params, consts, cfg=DEFAULT_CONFIG, R=1.0):
    """Same quantity as ``mt_integral_ball`` computed from v = T u(R e^{-s/(2+beta)})."""
    if not a > 0:
        raise DomainError("a must be positive")
    b = params.b_alpha
    val, _ = halfline_exp_integral(v, a / consts.T**b, b, cfg)
    q = 2.0 + params.beta
    return consts.c_beta * R**q / q * val


def mt_integral(u, a, params, consts, cfg=DEFAULT_CONFIG, R=1.0):
    """Exponential integral; ball quadrature for radial input, half-line form otherwise."""
    if isinstance(u, HalfLineProfile):
        return mt_integral_halfline(u, a, params, consts, cfg, R)
    return mt_integral_ball(u, a, params, consts, cfg)


def moser_lower_bound(n, a, params, consts):
    """(c_beta/(2+beta)) (e^{(a/a_sharp - 1) n} - e^{-n})."""
    expo = (a / consts.a_sharp - 1.0) * n
    _guard(expo, "lower bound")
    return consts.c_beta / (2.0 + params.beta) * (
        math.exp((a / consts.a_sharp - 1.0) * n) - math.exp(-n)
    )


@dataclass(frozen=True)
class HalfLineValue:
    I: float
    I_plus_1: float
    error: float


def i_functional(f: HalfLineProfile, params: WeightParams, cfg=DEFAULT_CONFIG) -> HalfLineValue:
    """I(f) = int_0^inf (e^{f^b} - 1) e^{-s} ds and the shifted I + 1."""
    val, err = halfline_exp_integral(f, 1.0, params.b_alpha, cfg)
    return HalfLineValue(val, val + 1.0, err)


@dataclass(frozen=True)
class FunctionalReport:
    energy: float
    mt_integral: float
    j_value: float
    a_used: float
    normalization: dict = field(default_factory=dict)

    def as_dict(self):
        d = asdict(self)
        norm = d.pop("normalization")
        d.update({f"normalization.{k}": v for k, v in norm.items()})
        return d


def j_normalizer(params, consts, c_zero=None):
    c0 = consts.c_zero if c_zero is None else c_zero
    return (2.0 + params.beta) * c0 * consts.m_beta_ball


def j_functional(u, params, consts, cfg=DEFAULT_CONFIG, c_zero=None) -> FunctionalReport:
    """J(u) = mt_integral(u, a_sharp) / ((2+beta) c0 m_beta(B^+)).

    Half-line input is read as the image of a profile on the unit ball."""
    if isinstance(u, RadialProfile) and u.R > 1.0:
        raise DomainError(f"J is defined on the unit ball; support radius {u.R} > 1")
    c0 = consts.c_zero if c_zero is None else c_zero
    mt = mt_integral(u, consts.a_sharp, params, consts, cfg)
    return FunctionalReport(
        energy=dirichlet_energy(u, params, consts),
        mt_integral=mt,
        j_value=mt / j_normalizer(params, consts, c0),
        a_used=consts.a_sharp,
        normalization={"c_zero": c0, "m_beta_ball": consts.m_beta_ball},
    )


def j_from_i(i_value, params, consts, c_zero=None):
    """J in terms of the half-line I of the normalized image."""
    c0 = consts.c_zero if c_zero is None else c_zero
    q = 2.0 + params.beta
    return consts.c_beta / (q * q * c0 * consts.m_beta_ball) * i_value


def scaled_mt_ratio(u: RadialProfile, R, a, params, consts, cfg=DEFAULT_CONFIG):
    """mt_integral of u dilated to radius R, divided by R^(2+beta)."""
    return mt_integral_ball(u.dilate(R), a, params, consts, cfg) / R ** (2.0 + params.beta)


# ------------------------------------------------------------ Onofri form


@dataclass(frozen=True)
class OnofriResult:
    lhs: float
    rhs: float
    zeta: float
    holds: bool
    energy: float
    energy_ok: bool


def onofri_check(u: RadialProfile, params, consts, cfg=DEFAULT_CONFIG, c_zero=None) -> OnofriResult:
    """Logarithmic inequality ln int_supp (e^u - zeta) t^beta <= ln((2+beta) c0 m(supp)) + ln zeta.

    The integral is taken over the support ball B_R.  A nonpositive argument
    of the logarithm makes the inequality vacuous (lhs = -inf).
    """
    c0 = consts.c_zero if c_zero is None else c_zero
    p = params.p
    energy = dirichlet_energy(u, params, consts)
    c_eps = (consts.a_sharp * p / (1.0 + params.alpha)) ** (-(1.0 + params.alpha)) / p
    log_zeta = c_eps * energy
    zeta = math.exp(log_zeta)
    _guard(float(u.values.max()), "exp(u)")
    q = 2.0 + params.beta
    m_supp = consts.c_beta * u.R**q / q
    res = integrate_radial(np.expm1 and (lambda r: np.expm1(u(r))), 1.0 + params.beta, u.R, cfg, u.grid)
    integral = consts.c_beta * res.value - math.expm1(log_zeta) * m_supp
    lhs = math.log(integral) if integral > 0 else -math.inf
    rhs = math.log(q * c0 * m_supp) + log_zeta
    return OnofriResult(lhs, rhs, zeta, bool(lhs <= rhs), energy, bool(energy <= 1.0 + 1e-12))


# ------------------------------------------------- second Trudinger-type form


@dataclass(frozen=True)
class Corollary24Result:
    lhs: float
    rhs: float
    condition_residual: float
    holds: bool


def corollary24_check(u: RadialProfile, a, params, consts, R0, cfg=DEFAULT_CONFIG, c_zero=None):
    """int_{B_R0} (e^{a u^{b_beta}} - 1) t^beta against c0 R0^(2+beta) c_beta.

    The exponent is b_beta here, not b_alpha."""
    if not params.alpha < params.beta:
        raise DomainError("hypothesis alpha < beta violated")
    if consts.b_alpha_beta is None:
        raise DomainError("constants bundle lacks b_alpha_beta")
    if not 0.0 < R0 <= u.R:
        raise DomainError(f"R0={R0} must lie in (0, {u.R}]")
    if np.any(np.diff(u.values) > 0):
        raise DomainError("hypothesis violated: u must be nonincreasing")
    if not 0.0 < a <= consts.b_alpha_beta * (1.0 + 1e-12):
        raise DomainError(f"hypothesis violated: a={a} must lie in (0, b_alpha_beta={consts.b_alpha_beta}]")
    e_in = energy_within(u, R0, params, consts)
    if e_in > 1.0 + 1e-9:
        raise DomainError(f"hypothesis violated: energy on B_R0 is {e_in} > 1")
    c0 = consts.c_zero if c_zero is None else c_zero
    lhs = mt_integral_ball(u, a, params, consts, cfg, exponent=params.b_beta, R=R0)
    rhs = c0 * R0 ** (2.0 + params.beta) * consts.c_beta
    residual = consts.T * float(u(R0)) - 1.0
    return Corollary24Result(lhs, rhs, residual, bool(lhs <= rhs))


# ------------------------------------------------------ Euler-Lagrange residual


@dataclass(frozen=True)
class ELResidual:
    lambda_star: float
    relative_residual: float
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def residual_for(self, lam):
        r = self.A - lam * self.B
        return math.sqrt(float(np.sum(self.weights * r * r)))


def el_residual(u: RadialProfile, params, consts, cfg=DEFAULT_CONFIG, minus_one=True) -> ELResidual:
    """Least-squares fit of the radial strong form A = lambda B at interior knots.

    A = -(c_alpha / (c_beta rho^(1+beta))) d/drho (rho^(1+alpha) |u'|^alpha u')
    B = u^(1/(1+alpha)) (e^{a u^b} - 1) / D,  D = int (e^{a u^b} - 1) u^(1/(1+alpha)) t^beta.

    The flux rho^(1+alpha)|u'|^alpha u' equals |w|^alpha w with w = du/dln(rho),
    so it is differenced in log-radius (exact on logarithmic ramps).  The
    knot next to the origin cell is skipped.  Norms are the discrete
    L^2(rho^(1+beta) drho) norms at the knots.

    ``minus_one=False`` replaces e^{a u^b} - 1 by e^{a u^b} in B and D, the
    form obtained by differentiating the functional itself.
    """
    rho, val = u.grid, u.values
    if np.any(val[:-1] <= 0.0):
        raise DomainError("u must be strictly positive in the interior")
    if rho.size < 4:
        raise DomainError("need at least two interior knots away from the origin")
    a, b, al = consts.a_sharp, params.b_alpha, params.alpha
    _guard(a * float(val.max()) ** b, "exp(a u^b)")
    e = 1.0 / (1.0 + al)

    shift = np.expm1 if minus_one else np.exp

    def dens(r):
        x = u(r)
        return shift(a * x**b) * x**e

    D = consts.c_beta * integrate_radial(dens, 1.0 + params.beta, u.R, cfg, rho).value

    dl = np.log(rho[2:] / rho[1:-1])  # log-length of cells 1..k-1
    w = np.diff(val[1:]) / dl
    flux = np.sign(w) * np.abs(w) ** (1.0 + al)
    i = np.arange(2, rho.size - 1)
    r_i = rho[i]
    dF = (flux[1:] - flux[:-1]) / (r_i * 0.5 * (dl[1:] + dl[:-1]))
    A = -(consts.c_alpha / consts.c_beta) * dF / r_i ** (1.0 + params.beta)
    ui = val[i]
    B = ui**e * shift(a * ui**b) / D
    W = r_i ** (1.0 + params.beta) * 0.5 * (rho[i + 1] - rho[i - 1])
    lam = float(np.sum(W * A * B) / np.sum(W * B * B))
    normA = math.sqrt(float(np.sum(W * A * A)))
    res = math.sqrt(float(np.sum(W * (A - lam * B) ** 2)))
    rel = res / normA if normA > 0 else math.inf
    return ELResidual(lam, rel, A, B, W)

"""Log-gamma by the Lanczos approximation (g = 7, nine coefficients).

Used as the independent closed-form route for the angular weight mass
``int_0^pi sin^a(t) dt = sqrt(pi) Gamma((a+1)/2) / Gamma(a/2 + 1)``.
"""

import math

_G = 7.0
_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def lgamma(x):
    """Natural log of |Gamma(x)| for real x not a non-positive integer."""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"lgamma pole at x={x}")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return math.log(math.pi / abs(math.sin(math.pi * x))) - lgamma(1.0 - x)
    x -= 1.0
    acc = _COEF[0]
    for k in range(1, len(_COEF)):
        acc += _COEF[k] / (x + k)
    t = x + _G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(acc)


def gamma(x):
    """Gamma(x) for x > 0."""
    if x <= 0.0:
        raise ValueError("gamma() here is restricted to x > 0")
    return math.exp(lgamma(x))


def angular_mass_closed_form(alpha):
    """sqrt(pi) Gamma((alpha+1)/2) / Gamma(alpha/2 + 1)."""
    return math.exp(
        0.5 * math.log(math.pi) + lgamma((alpha + 1.0) / 2.0) - lgamma(alpha / 2.0 + 1.0)
    )

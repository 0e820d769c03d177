"""Concentration diagnostics for sequences of profiles.

Tail energies away from the origin, the convergent / concentrating
classifier, the first crossing point of c f^b(a) = a - 2 ln a, and the
explicit exponential bounds used to cap concentrating sequences.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .constants import ConstantsBundle, WeightParams, splitting_constant
from .errors import DomainError
from .functionals import (
    dirichlet_energy,
    energy_outside,
    halfline_energy_upto,
    i_functional,
    j_from_i,
    j_functional,
)
from .profiles import HalfLineProfile, to_halfline
from .quadrature import DEFAULT_CONFIG

E = math.e


def tail_energy(u, delta, params: WeightParams, consts: ConstantsBundle) -> float:
    """Energy outside the ball of radius delta.

    For a half-line profile (image of a profile on the unit ball) this is
    the energy on [0, (2+beta) ln(1/delta)]."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta={delta} must lie in (0, 1)")
    if isinstance(u, HalfLineProfile):
        return halfline_energy_upto(u, (2.0 + params.beta) * math.log(1.0 / delta), params)
    if u.R > 1.0:
        raise DomainError("profile support must lie in the unit ball")
    return energy_outside(u, delta, params, consts)


# ------------------------------------------------------------- ceilings


@dataclass(frozen=True)
class Ceiling:
    ceiling_I_plus_1: float
    ceiling_J: float


def concentration_ceiling(params, consts, c_zero=None) -> Ceiling:
    c0 = consts.c_zero if c_zero is None else c_zero
    q = 2.0 + params.beta
    return Ceiling(1.0 + E, consts.c_beta / (q * q * c0 * consts.m_beta_ball) * (1.0 + E))


def carleson_chang_bound(c, delta0):
    """e^{c^2 delta0 / 4 + 1}."""
    if delta0 < 0:
        raise DomainError("delta0 must be nonnegative")
    return math.exp(c * c * delta0 / 4.0 + 1.0)


def lemma43_bound(phi_at, a, delta, sigma, alpha, c_one=1.0):
    """Right side of the tail estimate for int_{c1^2(1+alpha)a/16}^inf e^{phi^b - s} ds."""
    gap = 1.0 - (1.0 + sigma) * delta
    if not gap > 0:
        raise DomainError(f"need 1 - (1+sigma) delta > 0 (got {gap})")
    c = splitting_constant(sigma, alpha)
    b = (2.0 + alpha) / (1.0 + alpha)
    expo = (
        c * c_one * (1.0 + alpha) / 4.0 * phi_at**b
        - c_one**2 * (1.0 + alpha) * a / 16.0
        + c_one * delta / gap * phi_at / 4.0
        + 1.0
    )
    return math.exp(expo) / gap


def splitting_gap(v, L, sigma, alpha):
    """(1+sigma) v^b + c L^b - (v+L)^b, nonnegative by the splitting inequality."""
    b = (2.0 + alpha) / (1.0 + alpha)
    c = splitting_constant(sigma, alpha)
    return (1.0 + sigma) * v**b + c * L**b - (v + L) ** b


# --------------------------------------------------------- crossing point


def crossing_function(f: HalfLineProfile, c, params, a):
    a = np.asarray(a, dtype=float)
    with np.errstate(divide="ignore"):
        return c * f(a) ** params.b_alpha - a + 2.0 * np.log(a)


def crossing_point(f: HalfLineProfile, c, params: WeightParams, tol=1e-12) -> Optional[float]:
    """Smallest a >= 1 with c f^b(a) - a + 2 ln a = 0, or None.

    Knot cells are subsampled eightfold for the sign scan (g may have
    several roots); the bracket found is then bisected to ``tol``.
    """
    if c < 1.0:
        raise DomainError("c must be >= 1")
    energy = float(np.sum(np.abs(f.slopes) ** params.p * np.diff(f.grid)))
    if c * energy ** (1.0 / params.p) > 1.0 + 1e-12:
        raise DomainError("hypothesis c * Gamma(f) <= 1 violated")
    top = c * f.plateau**params.b_alpha
    end = max(f.S, 2.0 * top + 10.0)
    knots = f.grid[(f.grid > 1.0) & (f.grid < end)]
    edges = np.unique(np.concatenate([[1.0], knots, [end]]))
    t = np.linspace(0.0, 1.0, 9)[:-1]
    pts = np.append((edges[:-1, None] + np.diff(edges)[:, None] * t).ravel(), end)
    # beyond S the profile is flat; spacing 0.05 is enough there
    extra = np.arange(max(f.S, 1.0), end, 0.05)
    pts = np.unique(np.concatenate([pts, extra]))
    g = crossing_function(f, c, params, pts)
    hit = np.nonzero(g >= 0.0)[0]
    if hit.size == 0:
        return None
    k = int(hit[0])
    if k == 0:
        return float(pts[0])
    lo, hi = float(pts[k - 1]), float(pts[k])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if crossing_function(f, c, params, mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return hi


def has_root_below_one(f: HalfLineProfile, c, params, samples=4000) -> bool:
    """Whether g changes sign on (0, 1), sampled including every knot there."""
    a = np.concatenate([np.linspace(1e-9, 1.0, samples, endpoint=False), f.grid[(f.grid > 0) & (f.grid < 1)]])
    return bool(np.any(crossing_function(f, c, params, a) >= 0.0))


# --------------------------------------------------------------- dichotomy


@dataclass
class DichotomyReport:
    verdict: str
    tail_energies: list
    j_trajectory: list
    i_plus_1_trajectory: list
    j_limit_candidate: float
    ceiling: float
    ceiling_I_plus_1: float
    concentration_tol: float
    j_tol: float
    deltas: list
    alpha_flag: Optional[str] = None
    diagnostics: list = field(default_factory=list)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "delta", "tail_energy", "J"])
        for row in self.tail_energies:
            w.writerow([row["m"], repr(row["delta"]), repr(row["tail_energy"]), repr(self.j_trajectory[row["m"]])])
        return buf.getvalue()


def _as_halfline(u, params, consts):
    return u if isinstance(u, HalfLineProfile) else to_halfline(u, params, consts)


def classify_dichotomy(
    seq: Sequence,
    params: WeightParams,
    consts: ConstantsBundle,
    cfg=DEFAULT_CONFIG,
    concentration_tol=0.2,
    deltas=(0.5, 0.25, 0.1),
    j_tol=1e-4,
    c_zero=None,
    decay_ratio=0.5,
) -> DichotomyReport:
    """Classify a profile sequence as concentrating, convergent or inconclusive.

    concentrating: for every delta the last tail energy is below
        ``concentration_tol`` and at most ``decay_ratio`` times the largest
        tail energy seen along the sequence (the tail is actually draining).
    convergent: the J values over the second half of the sequence (at least
        two) lie within ``j_tol`` of each other and, for some delta, the last
        tail energy is at least ``concentration_tol``.
    Half-line members are read as images of profiles on the unit ball.
    """
    seq = list(seq)
    if not seq:
        raise DomainError("empty sequence")
    deltas = [float(d) for d in deltas]
    tails, js, ips, diag = [], [], [], []
    c_sig = consts.c_sigma_alpha
    for m, u in enumerate(seq):
        e = dirichlet_energy(u, params, consts)
        # sampled Moser functions carry an energy excess of order 1e-7
        if e > 1.0 + 1e-6:
            raise DomainError(f"member {m} has energy {e} > 1")
        for d in deltas:
            tails.append({"m": m, "delta": d, "tail_energy": tail_energy(u, d, params, consts)})
        if isinstance(u, HalfLineProfile):
            iv = i_functional(u, params, cfg).I
            js.append(j_from_i(iv, params, consts, c_zero))
        else:
            js.append(j_functional(u, params, consts, cfg, c_zero).j_value)
            iv = js[-1] * (2.0 + params.beta) * (consts.c_zero if c_zero is None else c_zero)
        ips.append(iv + 1.0)
        if c_sig is not None:
            diag.append(_crossing_diagnostics(m, _as_halfline(u, params, consts), c_sig, params, consts))

    by_delta = {d: [t["tail_energy"] for t in tails if t["delta"] == d] for d in deltas}
    draining = all(
        v[-1] < concentration_tol and v[-1] <= decay_ratio * max(v) and len(v) > 1
        for v in by_delta.values()
    )
    half = seq[len(seq) // 2 :] if len(seq) >= 4 else seq
    window = js[-max(2, len(half)) :]
    cauchy = len(js) >= 2 and (max(window) - min(window)) <= j_tol
    held = any(v[-1] >= concentration_tol for v in by_delta.values())
    if draining:
        verdict = "concentrating"
    elif cauchy and held:
        verdict = "convergent"
    else:
        verdict = "inconclusive"
    ceil = concentration_ceiling(params, consts, c_zero)
    flag = None
    if params.alpha <= 0.0:
        flag = "alpha <= 0: the ceiling estimate is established only for alpha > 0"
    return DichotomyReport(
        verdict=verdict,
        tail_energies=tails,
        j_trajectory=js,
        i_plus_1_trajectory=ips,
        j_limit_candidate=js[-1],
        ceiling=ceil.ceiling_J,
        ceiling_I_plus_1=ceil.ceiling_I_plus_1,
        concentration_tol=concentration_tol,
        j_tol=j_tol,
        deltas=deltas,
        alpha_flag=flag,
        diagnostics=diag,
    )


def _crossing_diagnostics(m, f, c_sig, params, consts):
    out = {"m": m, "a_m": None, "delta_m": None, "k_m": None}
    try:
        a_m = crossing_point(f, c_sig, params)
    except DomainError as exc:
        out["note"] = str(exc)
        return out
    if a_m is None:
        return out
    al = params.alpha
    s = np.maximum(f.grid, a_m)
    tail = float(np.sum(np.abs(f.slopes) ** params.p * np.diff(s)))
    delta_m = c_sig ** (1.0 + al) * tail
    out.update(a_m=a_m, delta_m=delta_m)
    sigma = params.sigma
    gap = 1.0 - (1.0 + sigma) * delta_m
    if gap > 0:
        c1 = consts.c_one
        fa = float(f(a_m))
        out["k_m"] = (
            c_sig * c1 * (1.0 + al) / 4.0 * fa**params.b_alpha
            - (1.0 + al) / 4.0 * a_m * c1
            + c1 * delta_m / gap * fa / 4.0
        )
    return out

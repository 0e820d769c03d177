"""Constrained maximization of I(f) = int_0^inf (e^{f^b} - 1) e^{-s} ds
over half-line profiles with energy int |f'|^(2+alpha) <= kappa^(2+alpha).

The discretization is a piecewise-linear f on a fixed grid with f(0) = 0
and f constant beyond S.  Cell integrals use a fixed Gauss-Legendre rule,
so the objective is a smooth function of the knot values and its gradient
is exact.  Ascent steps are taken in slope space along the energy-dual
direction, then pulled back onto the constraint by scaling.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .concentration import concentration_ceiling
from .constants import ConstantsBundle, WeightParams
from .errors import DomainError
from .functionals import el_residual, j_from_i
from .profiles import (
    CC_KINK,
    HalfLineProfile,
    carleson_chang_test,
    from_halfline,
    halfline_grid,
    moser_halfline,
    rearrange_decreasing,
)
from .quadrature import gauss_legendre

DEFAULT_STARTS = ("zero-perturbed", "phi0", "moser(2)", "moser(5)", "moser(10)")


@dataclass(frozen=True)
class SearchConfig:
    kappa: float = 1.0
    h: float = 0.05
    s_uniform: float = 20.0
    S: float = 80.0
    growth: float = 1.1
    max_iters: int = 10000
    step0: float = 0.1
    armijo: float = 1e-4
    conv_tol: float = 1e-9
    starts: tuple = DEFAULT_STARTS
    nodes: int = 8
    direction: str = "energy-dual"
    seed: int = 0

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError("kappa must be positive")
        if self.max_iters < 1:
            raise DomainError("max_iters must be >= 1")
        if not 0.0 < self.armijo < 1.0:
            raise DomainError("armijo must lie in (0, 1)")
        if not (self.step0 > 0 and self.conv_tol > 0):
            raise DomainError("step0 and conv_tol must be positive")
        if self.direction not in ("energy-dual", "euclidean"):
            raise DomainError(f"unknown direction {self.direction!r}")
        if not self.starts:
            raise DomainError("need at least one start")
        # raises on a bad grid specification
        halfline_grid(self.h, self.s_uniform, self.S, self.growth)

    def grid(self):
        extra = [2.0, CC_KINK] + [float(n) for n in _moser_orders(self.starts)]
        return halfline_grid(self.h, self.s_uniform, self.S, self.growth, extra)


def _moser_orders(starts):
    for name in starts:
        if name.startswith("moser(") and name.endswith(")"):
            yield int(name[6:-1])


# ------------------------------------------------------------ objective


class Objective:
    """I + 1 of a knot-value vector on a fixed grid, with exact gradient."""

    def __init__(self, grid, params: WeightParams, nodes=8):
        self.grid = np.asarray(grid, dtype=float)
        self.params = params
        self.b = params.b_alpha
        self.p = params.p
        x, w = gauss_legendre(nodes)
        lo, hi = self.grid[:-1], self.grid[1:]
        self.dx = hi - lo
        self.lam = 0.5 * (1.0 + x)  # local coordinate of the nodes in [0, 1]
        self.pts = lo[:, None] + self.dx[:, None] * self.lam[None, :]
        self.wts = 0.5 * self.dx[:, None] * w[None, :]
        self.S = float(self.grid[-1])

    def _exponent(self, f):
        fn = f[:-1, None] * (1.0 - self.lam) + f[1:, None] * self.lam
        return fn, np.abs(fn) ** self.b - self.pts

    def value(self, f):
        _, ex = self._exponent(f)
        top = max(float(ex.max()), abs(f[-1]) ** self.b - self.S)
        if top > 700.0:
            return math.inf
        return float(np.sum(np.exp(ex) * self.wts)) + math.exp(abs(f[-1]) ** self.b - self.S)

    def gradient(self, f):
        fn, ex = self._exponent(f)
        dens = self.b * np.abs(fn) ** (self.b - 1.0) * np.sign(fn) * np.exp(ex) * self.wts
        g = np.zeros_like(f)
        g[:-1] += np.sum(dens * (1.0 - self.lam), axis=1)
        g[1:] += np.sum(dens * self.lam, axis=1)
        fk = f[-1]
        g[-1] += self.b * abs(fk) ** (self.b - 1.0) * np.sign(fk) * math.exp(abs(fk) ** self.b - self.S)
        g[0] = 0.0  # f(0) = 0 is fixed
        return g

    def energy(self, f):
        return float(np.sum(np.abs(np.diff(f)) ** self.p / self.dx ** (self.p - 1.0)))


# --------------------------------------------------------------- search


@dataclass
class StartOutcome:
    start: str
    initial_value: float
    final_value: float
    iterations: int
    converged: bool


@dataclass
class SearchResult:
    best_profile: HalfLineProfile
    best_I_plus_1: float
    best_J: float
    per_start: list
    ceiling_margin: float
    el_relative_residual: float
    el_lambda_star: float
    el_residual_unshifted: float
    best_start: str
    kappa: float
    trace: list = field(default_factory=list, repr=False)



def start_profile(name, grid, params, consts, kappa, seed=0):
    """Named start sampled on the search grid, scaled into the constraint."""
    if name == "zero-perturbed":
        rng = np.random.default_rng(seed)
        f = 1e-3 * np.concatenate([[0.0], np.cumsum(rng.uniform(0.0, 1.0, grid.size - 1))])
        f = f * (grid / grid[-1] <= 1.0)
    elif name == "phi0":
        f = carleson_chang_test(params.alpha)(grid)
    elif name.startswith("moser(") and name.endswith(")"):
        f = moser_halfline(int(name[6:-1]), params)(grid)
    else:
        raise DomainError(f"unknown start {name!r}")
    f = np.asarray(f, dtype=float).copy()
    f[0] = 0.0
    obj_e = float(np.sum(np.abs(np.diff(f)) ** params.p / np.diff(grid) ** (params.p - 1.0)))
    cap = kappa**params.p
    if obj_e > cap:
        f *= (cap / obj_e) ** (1.0 / params.p)
    return f


def _project(f, obj, cap):
    e = obj.energy(f)
    if e > cap:
        f = f * (cap / e) ** (1.0 / obj.p)
    return f


def _direction(g, obj, kind):
    if kind == "euclidean":
        d = g.copy()
        d[0] = 0.0
        return d
    # slopes sigma_c; dI/dsigma_c = dx_c * sum_{j > c} g_j
    C = np.cumsum(g[::-1])[::-1][1:]
    sig = np.sign(C) * np.abs(C) ** (1.0 / (obj.p - 1.0))
    norm = float(np.sum(np.abs(sig) ** obj.p * obj.dx)) ** (1.0 / obj.p)
    if norm == 0.0:
        return np.zeros_like(g)
    return np.concatenate([[0.0], np.cumsum(sig / norm * obj.dx)])


def ascend(f0, obj: Objective, cfg: SearchConfig, name="", trace=None):
    cap = cfg.kappa ** obj.p
    f = _project(np.asarray(f0, dtype=float), obj, cap)
    val = obj.value(f)
    if not math.isfinite(val):
        raise DomainError(f"start {name!r} overflows the objective")
    init = val
    t = cfg.step0
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        g = obj.gradient(f)
        d = _direction(g, obj, cfg.direction)
        if not np.any(d):
            converged = True
            break
        accepted = False
        while t > 1e-14:
            trial = np.abs(_project(f + t * d, obj, cap))
            tv = obj.value(trial)
            if math.isfinite(tv):
                gain = float(np.dot(g, trial - f))
                if tv >= val + cfg.armijo * max(gain, 0.0) and tv > val:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            converged = True
            break
        # improvement relative to I = (I+1) - 1, not to I+1
        rel = (tv - val) / max(val - 1.0, 1e-300)
        f, val = trial, tv
        if trace is not None:
            trace.append((name, it, val, obj.energy(f), t))
        t = min(2.0 * t, 1e3)
        if rel < cfg.conv_tol:
            converged = True
            break
    return f, val, StartOutcome(name, init, val, it, converged)


def maximize(params: WeightParams, consts: ConstantsBundle, cfg: SearchConfig = SearchConfig(), keep_trace=False):
    """Multi-start ascent; returns the best profile with its diagnostics."""
    if cfg.kappa ** params.b_alpha >= 1.0 and not math.isfinite(cfg.S):
        raise DomainError("kappa^b >= 1 needs a finite plateau start S")
    grid = cfg.grid()
    obj = Objective(grid, params, cfg.nodes)
    trace = [] if keep_trace else None
    best = None
    outcomes = []
    for name in cfg.starts:
        f0 = start_profile(name, grid, params, consts, cfg.kappa, cfg.seed)
        f, val, out = ascend(f0, obj, cfg, name, trace)
        outcomes.append(out)
        if best is None or val > best[1]:
            best = (f, val, name)
    f, val, name = best
    prof = HalfLineProfile(grid, f)
    el = _el_of(prof, params, consts)
    ceil = concentration_ceiling(params, consts)
    return SearchResult(
        best_profile=prof,
        best_I_plus_1=val,
        best_J=j_from_i(val - 1.0, params, consts),
        per_start=outcomes,
        ceiling_margin=val - ceil.ceiling_I_plus_1,
        el_relative_residual=el[0],
        el_lambda_star=el[1],
        el_residual_unshifted=el[2],
        best_start=name,
        kappa=cfg.kappa,
        trace=trace or [],
    )


def _el_of(prof, params, consts):
    try:
        u = rearrange_decreasing(from_halfline(prof, params, consts), params)
        r = el_residual(u, params, consts)
        r2 = el_residual(u, params, consts, minus_one=False)
        return r.relative_residual, r.lambda_star, r2.relative_residual
    except DomainError:
        return math.nan, math.nan, math.nan


@dataclass(frozen=True)
class CeilingComparison:
    exceeds_ceiling: bool
    margin: float


def compare_with_concentration(result_or_value, params, consts) -> CeilingComparison:
    """best I+1 against the concentration ceiling 1 + e."""
    val = getattr(result_or_value, "best_I_plus_1", result_or_value)
    margin = float(val) - concentration_ceiling(params, consts).ceiling_I_plus_1
    return CeilingComparison(margin > 0.0, margin)


def result_json(res: SearchResult, params, consts):
    cmp = compare_with_concentration(res, params, consts)
    d = {
        "best_I_plus_1": res.best_I_plus_1,
        "best_J": res.best_J,
        "best_start": res.best_start,
        "best_energy": float(np.sum(np.abs(res.best_profile.slopes) ** params.p * np.diff(res.best_profile.grid))),
        "ceiling_margin": res.ceiling_margin,
        "exceeds_ceiling": cmp.exceeds_ceiling,
        "el_relative_residual": res.el_relative_residual,
        "el_lambda_star": res.el_lambda_star,
        "el_residual_unshifted": res.el_residual_unshifted,
        "kappa": res.kappa,
        "per_start": [asdict(o) for o in res.per_start],
    }
    return json.dumps(d, indent=2, sort_keys=True)


def trace_csv(res: SearchResult):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["start", "iter", "objective", "energy", "step"])
    for row in res.trace:
        w.writerow([row[0], row[1], repr(row[2]), repr(row[3]), repr(row[4])])
    return buf.getvalue()

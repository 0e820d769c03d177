"""Seeded profile corpus used by property checks and the c0 estimate."""

from __future__ import annotations

import numpy as np

from .constants import ConstantsBundle, WeightParams
from .functionals import dirichlet_energy, i_functional
from .profiles import (
    HalfLineProfile,
    RadialProfile,
    carleson_chang_test,
    moser_halfline,
)
from .quadrature import DEFAULT_CONFIG

MOSER_NS = (1, 2, 3, 5, 10, 20, 40)


def random_radial(rng: np.random.Generator, knots=12, R=1.0, peak=1.0, monotone=False) -> RadialProfile:
    """Random piecewise-linear radial profile on a jittered grid, u(R) = 0."""
    inner = np.sort(rng.uniform(0.0, R, knots - 2))
    grid = np.unique(np.concatenate([[0.0], inner, [R]]))
    vals = rng.uniform(0.0, peak, grid.size)
    if monotone:
        vals = np.sort(vals)[::-1]
    vals[-1] = 0.0
    return RadialProfile(grid, vals)


def random_halfline(rng: np.random.Generator, knots=10, S=30.0) -> HalfLineProfile:
    """Random nondecreasing half-line profile, f(0) = 0, flat beyond S."""
    inner = np.sort(rng.uniform(0.0, S, knots - 2))
    grid = np.unique(np.concatenate([[0.0], inner, [S]]))
    incr = rng.exponential(1.0, grid.size - 1) * (rng.uniform(size=grid.size - 1) < 0.8)
    vals = np.concatenate([[0.0], np.cumsum(incr)])
    if vals[-1] == 0.0:
        vals[-1] = 1.0
    return HalfLineProfile(grid, vals)


def unit_energy(f, params, consts):
    e = dirichlet_energy(f, params, consts)
    return f.scaled(e ** (-1.0 / params.p)) if e > 0 else f


def halfline_corpus(params: WeightParams, consts: ConstantsBundle, n_random=20, seed=0):
    """Named unit-energy half-line profiles: Moser members, the normalized
    test profile, and seeded random shapes.  Returns (name, profile) pairs."""
    out = [(f"moser({n})", moser_halfline(n, params)) for n in MOSER_NS]
    out.append(("phi0", unit_energy(carleson_chang_test(params.alpha), params, consts)))
    rng = np.random.default_rng(seed)
    for k in range(n_random):
        f = random_halfline(rng, knots=int(rng.integers(3, 12)), S=float(rng.uniform(2.0, 40.0)))
        out.append((f"random({seed}:{k})", unit_energy(f, params, consts)))
    return out


def estimate_c0(params, consts, n_random=20, seed=0, cfg=DEFAULT_CONFIG):
    """max over the corpus of I(f)/(2+beta): a lower bound for the Adams constant.

    Returns (estimate, name of the maximizing profile, per-profile values)."""
    rows = []
    for name, f in halfline_corpus(params, consts, n_random, seed):
        rows.append((name, i_functional(f, params, cfg).I / (2.0 + params.beta)))
    best = max(rows, key=lambda r: r[1])
    return best[1], best[0], rows

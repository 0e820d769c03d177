"""Quadrature engines for the two integral shapes that occur everywhere here.

* ``integrate_radial``: int_0^R g(rho) rho^p drho with p > -1, the radial
  reduction of an integral over a half ball.
* ``integrate_halfline_exp``: int_0^inf g(s) e^{-s} ds, the same integral
  after the logarithmic change of variables.

Both use Gauss-Legendre rules on the caller's breakpoints (profile knots),
bisecting cells whose n-point and 2n-point results disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import roots_jacobi

from .errors import DomainError, NumericError

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    nodes_per_cell: int = 16
    # None means adaptive tail (certified truncation); a float fixes S.
    s_max: Optional[float] = None
    max_subdivisions: int = 20

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("abs_tol and rel_tol must be positive")
        if self.nodes_per_cell < 2:
            raise DomainError("nodes_per_cell must be >= 2")
        if self.s_max is not None and not self.s_max > 0:
            raise DomainError("s_max must be positive")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    tail_bound: Optional[float] = None

    def __float__(self):
        return float(self.value)


@lru_cache(maxsize=64)
def gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@lru_cache(maxsize=64)
def _gauss_jacobi_unit(n, p):
    # nodes/weights for int_0^1 h(y) y^p dy
    x, w = roots_jacobi(n, 0.0, p)
    y = 0.5 * (1.0 + x)
    w = w * 2.0 ** (-p - 1.0)
    return y, w


def cell_integrals(f: Integrand, a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Per-cell n-point Gauss-Legendre integrals of f over [a_i, b_i]."""
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    pts = mid[:, None] + half[:, None] * x[None, :]
    return (np.asarray(f(pts)) * w[None, :]).sum(axis=1) * half


def _adaptive(f, a, b, cfg, extra_value=0.0, extra_error=0.0):
    n = cfg.nodes_per_cell
    span = float(np.sum(b - a))
    done_val, done_err = 0.0, 0.0
    for _ in range(cfg.max_subdivisions + 1):
        q1 = cell_integrals(f, a, b, n)
        q2 = cell_integrals(f, a, b, 2 * n)
        err = np.abs(q2 - q1)
        total = done_val + float(q2.sum()) + extra_value
        total_err = done_err + float(err.sum()) + extra_error
        if not math.isfinite(total):
            raise NumericError("non-finite integrand value", estimate=total)
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if total_err <= tol:
            return QuadResult(total, total_err)
        share = 0.5 * tol * np.maximum((b - a) / span, 1.0 / a.size)
        bad = err > share
        if not bad.any():
            bad = err >= 0.5 * err.max()
        done_val += float(q2[~bad].sum())
        done_err += float(err[~bad].sum())
        a, b = a[bad], b[bad]
        m = 0.5 * (a + b)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
    raise NumericError(
        f"tolerance {tol:.3g} not reached after {cfg.max_subdivisions} subdivisions",
        estimate=total,
        error=total_err,
    )


def _knots(breakpoints, lo, hi):
    pts = [lo, hi]
    if breakpoints is not None:
        bp = np.asarray(breakpoints, dtype=float).ravel()
        pts.extend(bp[(bp > lo) & (bp < hi)].tolist())
    return np.unique(np.asarray(pts, dtype=float))


def integrate_radial(
    g: Integrand,
    weight_exponent: float,
    R: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    breakpoints: Optional[Sequence[float]] = None,
) -> QuadResult:
    """int_0^R g(rho) rho^p drho, p = weight_exponent > -1.

    The first cell is graded geometrically toward rho = 0 (ratio 1/4) down to
    a relative size where its remainder is below 1e-12 of the cell weight;
    that innermost piece uses Gauss-Jacobi with weight rho^p.
    """
    p = float(weight_exponent)
    if not p > -1.0:
        raise DomainError(f"weight exponent {p} must exceed -1")
    if not R > 0:
        raise DomainError("R must be positive")
    knots = _knots(breakpoints, 0.0, float(R))
    first = knots[1]
    levels = max(3, int(math.ceil(12.0 * math.log(10.0) / ((p + 1.0) * math.log(4.0)))))
    levels = min(levels, 1000)
    graded = first * 0.25 ** np.arange(levels + 1)
    eps = graded[-1]
    a = np.concatenate([graded[1:][::-1], knots[1:-1]])
    b = np.concatenate([graded[:-1][::-1], knots[2:]])

    n = cfg.nodes_per_cell
    y1, w1 = _gauss_jacobi_unit(n, p)
    y2, w2 = _gauss_jacobi_unit(2 * n, p)
    scale = eps ** (p + 1.0)
    j1 = scale * float(np.dot(w1, g(eps * y1)))
    j2 = scale * float(np.dot(w2, g(eps * y2)))

    def weighted(x):
        return g(x) * x**p

    return _adaptive(weighted, a, b, cfg, extra_value=j2, extra_error=abs(j2 - j1))


def integrate_halfline_exp(
    g: Integrand,
    kappa_b: Optional[float] = None,
    C: float = 1.0,
    S: Optional[float] = None,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    breakpoints: Optional[Sequence[float]] = None,
) -> QuadResult:
    """int_0^inf g(s) e^{-s} ds.

    With ``kappa_b`` < 1 the caller certifies g(s) e^{-s} <= C e^{(kappa_b-1)s};
    the truncation point is then chosen so the tail is below ``cfg.abs_tol``
    and reported as ``tail_bound``.  With an explicit ``S`` (or ``cfg.s_max``)
    the integral is taken over [0, S] only and ``tail_bound`` is None.
    """
    tail_bound = None
    if S is None and kappa_b is not None:
        if not kappa_b < 1.0:
            raise NumericError(f"growth rate kappa^b={kappa_b} >= 1: tail not summable")
        gap = 1.0 - kappa_b
        S = max(1.0, math.log(max(C, 1e-300) / (gap * 0.5 * cfg.abs_tol)) / gap)
        tail_bound = C * math.exp(-gap * S) / gap
    elif S is None:
        S = cfg.s_max
    if S is None:
        raise DomainError("need either a certified growth bound (kappa_b) or an explicit S")
    S = float(S)
    knots = _knots(breakpoints, 0.0, S)
    # cells no longer than 2 so the e^{-s} factor is well resolved from the start
    pieces = []
    for lo, hi in zip(knots[:-1], knots[1:]):
        m = max(1, int(math.ceil((hi - lo) / 2.0)))
        pieces.append(np.linspace(lo, hi, m + 1))
    edges = np.unique(np.concatenate(pieces))
    a, b = edges[:-1], edges[1:]

    def weighted(x):
        return g(x) * np.exp(-x)

    res = _adaptive(weighted, a, b, cfg)
    return QuadResult(res.value, res.error, tail_bound)

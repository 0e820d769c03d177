"""Radial and half-line profiles, the change of variables between them, and
the named constructions (Moser sequence, Carleson-Chang test profile).

Ball coordinates: u(rho) on [0, R], piecewise linear, u(R) = 0.
Half-line coordinates: s = (2+beta) ln(R/rho), v(s) = T u(rho), piecewise
linear on [0, S] and held constant at v(S) beyond S.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .constants import ConstantsBundle, WeightParams
from .errors import DomainError


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def _check_grid(grid, values):
    if grid.ndim != 1 or grid.shape != values.shape:
        raise DomainError("grid and values must be 1-d arrays of equal length")
    if grid.size < 2:
        raise DomainError("a profile needs at least two knots")
    if grid[0] != 0.0:
        raise DomainError("grid must start at 0")
    if not np.all(np.diff(grid) > 0):
        raise DomainError("grid must be strictly increasing")
    if not np.all(np.isfinite(values)):
        raise DomainError("profile values must be finite")
    if np.any(values < 0):
        raise DomainError("profile values must be nonnegative")


@dataclass(frozen=True, eq=False)
class RadialProfile:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "grid", _frozen(self.grid))
        object.__setattr__(self, "values", _frozen(self.values))
        _check_grid(self.grid, self.values)
        if self.values[-1] != 0.0:
            raise DomainError("a radial profile must vanish at its support radius")

    @property
    def R(self):
        return float(self.grid[-1])

    @property
    def slopes(self):
        return np.diff(self.values) / np.diff(self.grid)

    def __call__(self, rho):
        return np.interp(rho, self.grid, self.values, right=0.0)

    def dilate(self, R):
        """Same shape supported on [0, R]."""
        return RadialProfile(self.grid * (R / self.R), self.values)

    def scaled(self, factor):
        return RadialProfile(self.grid, self.values * factor)


@dataclass(frozen=True, eq=False)
class HalfLineProfile:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "grid", _frozen(self.grid))
        object.__setattr__(self, "values", _frozen(self.values))
        _check_grid(self.grid, self.values)
        if self.values[0] != 0.0:
            raise DomainError("a half-line profile must vanish at s = 0")

    @property
    def S(self):
        return float(self.grid[-1])

    @property
    def plateau(self):
        return float(self.values[-1])

    @property
    def slopes(self):
        return np.diff(self.values) / np.diff(self.grid)

    def __call__(self, s):
        return np.interp(s, self.grid, self.values)

    def scaled(self, factor):
        return HalfLineProfile(self.grid, self.values * factor)

    def on_grid(self, grid):
        """Piecewise-linear interpolant on another grid (plateau kept)."""
        grid = np.asarray(grid, dtype=float)
        return HalfLineProfile(grid, self(grid))


Profile = Union[RadialProfile, HalfLineProfile]


def halfline_grid(h=0.05, s_uniform=20.0, S=80.0, growth=1.1, extra_knots=()):
    """Uniform spacing h on [0, s_uniform], then cells growing by ``growth``
    up to S.  ``extra_knots`` are merged in (e.g. kinks of a start profile)."""
    if not (h > 0 and s_uniform > 0 and S >= s_uniform and growth >= 1.0):
        raise DomainError("invalid half-line grid specification")
    m = int(round(s_uniform / h))
    if m < 1:
        raise DomainError("grid spacing larger than the uniform range")
    knots = list(np.linspace(0.0, s_uniform, m + 1))
    s, step = s_uniform, h
    while s < S:
        step *= growth
        s = min(S, s + step)
        if S - s < 0.5 * step:
            s = S
        knots.append(s)
    knots.extend(k for k in extra_knots if 0.0 < k < S)
    grid = np.unique(np.asarray(knots, dtype=float))
    # drop knots closer than 1e-9 to a neighbour (merged extras)
    keep = np.concatenate([[True], np.diff(grid) > 1e-9])
    return grid[keep]


def to_halfline(
    u: RadialProfile,
    params: WeightParams,
    consts: ConstantsBundle,
    refine: int = 1,
    s_max: float = 80.0,
) -> HalfLineProfile:
    """v(s) = T u(R e^{-s/(2+beta)}), knot for knot.

    Ball knots rho_i > 0 map to s_i = (2+beta) ln(R/rho_i).  The origin has no
    finite image: one knot is placed at ``s_max`` carrying the exact value
    there, with the plateau beyond.  ``refine`` inserts extra knots, uniform
    in s, inside every ball cell (values taken from u exactly).
    """
    q = 2.0 + params.beta
    R = u.R
    rho = u.grid[1:][::-1]
    s = q * np.log(R / rho)
    s[0] = 0.0
    if s[-1] < s_max - 1e-9:
        s = np.append(s, s_max)
    if refine > 1:
        t = np.linspace(0.0, 1.0, refine + 1)[:-1]
        s = np.append((s[:-1, None] + np.diff(s)[:, None] * t[None, :]).ravel(), s[-1])
    vals = consts.T * u(R * np.exp(-s / q))
    vals[0] = 0.0
    return HalfLineProfile(s, vals)


def from_halfline(
    v: HalfLineProfile,
    params: WeightParams,
    consts: ConstantsBundle,
    R: float = 1.0,
    max_dlog: float | None = None,
) -> RadialProfile:
    """u(rho) = v((2+beta) ln(R/rho)) / T; the plateau becomes u on [0, rho(S)].

    Knot for knot by default.  A linear piece in s is a logarithmic ramp in
    rho, so ``max_dlog`` optionally subdivides every cell until its
    log-radius length is at most that value (values still exact).
    """
    if not R > 0:
        raise DomainError("R must be positive")
    q = 2.0 + params.beta
    s = v.grid
    if max_dlog is not None:
        pieces = [s[:1]]
        for lo, hi in zip(s[:-1], s[1:]):
            k = max(1, int(math.ceil((hi - lo) / q / max_dlog)))
            pieces.append(np.linspace(lo, hi, k + 1)[1:])
        s = np.concatenate(pieces)
    rho = R * np.exp(-s / q)
    vals = v(s) / consts.T
    # knots closer to s = 0 than rounding can resolve collapse onto rho = R
    keep = (rho > 1e-300) & np.concatenate([[True], np.diff(rho) < 0])
    keep[1:] &= rho[1:] < R
    rho, vals = rho[keep][::-1], vals[keep][::-1]
    rho[-1] = R
    grid = np.concatenate([[0.0], rho])
    values = np.concatenate([[v.plateau / consts.T], vals])
    values[-1] = 0.0
    return RadialProfile(grid, values)


def level_measure(u: RadialProfile, levels, beta, c_beta=1.0):
    """m({u > lam}) for the measure c_beta rho^(1+beta) drho, each lam in levels."""
    lam = np.asarray(levels, dtype=float)[:, None]
    r0, r1 = u.grid[None, :-1], u.grid[None, 1:]
    y0, y1 = u.values[None, :-1], u.values[None, 1:]
    dy = y1 - y0
    with np.errstate(divide="ignore", invalid="ignore"):
        x = r0 + (lam - y0) / dy * (r1 - r0)
    above0, above1 = y0 > lam, y1 > lam
    lo = np.where(above0, r0, np.where(above1, x, r0))
    hi = np.where(above1, r1, np.where(above0, x, r0))
    q = 2.0 + beta
    return c_beta * (hi**q - lo**q).sum(axis=1) / q


def rearrange_decreasing(u: RadialProfile, params: WeightParams, refine: int = 1) -> RadialProfile:
    """Monotone rearrangement of a radial profile with respect to rho^(1+beta) drho.

    u*(r) is the level lam with m({u > lam}) = m(B_r), evaluated exactly at
    the output knots by bisection on the distribution function.  Output
    knots are the input knots (optionally subdivided ``refine`` times) plus
    the radii where u* crosses a knot value of u or one of a set of
    evenly spaced levels, plus evenly spaced radii.
    """
    if refine < 1:
        raise DomainError("refine must be >= 1")
    grid = u.grid
    if refine > 1:
        t = np.linspace(0.0, 1.0, refine + 1)[:-1]
        grid = np.append((grid[:-1, None] + np.diff(grid)[:, None] * t[None, :]).ravel(), grid[-1])
    if np.all(np.diff(u.values) <= 0.0):
        return RadialProfile(grid, u(grid))
    q = 2.0 + params.beta
    # radii at which u* passes through the knot values of u: the kinks of u*
    # plus radii for evenly spaced levels, which resolve the cap near the origin
    top = float(u.values.max())
    levels = np.unique(np.concatenate([u.values, np.linspace(0.0, top, 8 * refine * u.grid.size + 1)]))
    kinks = (q * level_measure(u, levels, params.beta)) ** (1.0 / q)
    n_even = 8 * refine * u.grid.size
    grid = np.unique(
        np.concatenate([grid, kinks[(kinks > 0.0) & (kinks < grid[-1])], np.linspace(0.0, grid[-1], n_even + 1)])
    )
    target = grid**q / q
    lo = np.zeros_like(grid)
    hi = np.full_like(grid, u.values.max())
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        small = level_measure(u, mid, params.beta) <= target
        hi = np.where(small, mid, hi)
        lo = np.where(small, lo, mid)
    vals = hi
    vals[-1] = 0.0
    vals[0] = u.values.max()
    return RadialProfile(grid, np.minimum.accumulate(vals))


def moser_ball(n, params: WeightParams, consts: ConstantsBundle, dlog=1e-3) -> RadialProfile:
    """Moser function M_n sampled on a grid uniform in ln(rho) over the ramp."""
    if n < 1:
        raise DomainError("n must be >= 1")
    q, p = 2.0 + params.beta, 2.0 + params.alpha
    amp = consts.c_alpha ** (-1.0 / p)
    log_rn = -n / q
    m = max(1, int(math.ceil(-log_rn / dlog)))
    ramp = np.exp(np.linspace(log_rn, 0.0, m + 1))
    ramp[-1] = 1.0
    vals = amp * (q / n) ** (1.0 / p) * (-np.log(ramp))
    vals[0] = amp * (n / q) ** (1.0 / params.b_alpha)
    vals[-1] = 0.0
    grid = np.concatenate([[0.0], ramp])
    return RadialProfile(grid, np.concatenate([[vals[0]], vals]))


def moser_halfline(n, params: WeightParams) -> HalfLineProfile:
    """f_n(s) = min(s n^(-1/(2+alpha)), n^((1+alpha)/(2+alpha))): unit energy."""
    if n < 1:
        raise DomainError("n must be >= 1")
    p = 2.0 + params.alpha
    return HalfLineProfile([0.0, float(n)], [0.0, n ** ((1.0 + params.alpha) / p)])


CC_KINK = math.e**2 + 1.0


def cc_base(s):
    """s/2 on [0,2], sqrt(s-1) on [2, e^2+1], e beyond."""
    s = np.asarray(s, dtype=float)
    return np.where(s <= 2.0, 0.5 * s, np.sqrt(np.clip(np.minimum(s, CC_KINK) - 1.0, 0.0, None)))


def carleson_chang_test(alpha, h=2e-3, ratio=1.02) -> HalfLineProfile:
    """phi0 = f^(2(1+alpha)/(2+alpha)) for the piecewise test function f.

    For alpha != 0 the power is not linear on [0, 2]; that piece is graded
    geometrically toward s = 0 before switching to the uniform spacing h.
    """
    if not alpha > -1.0:
        raise DomainError(f"alpha={alpha} must exceed -1")
    gam = 2.0 * (1.0 + alpha) / (2.0 + alpha)
    if alpha == 0.0:
        head = np.array([0.0])
    else:
        # geometric until the cell ratio matches the uniform spacing
        s_sw = min(1.0, h / (ratio - 1.0))
        graded = int(math.ceil(math.log(s_sw / 1e-30) / math.log(ratio)))
        k = int(math.ceil((2.0 - s_sw) / h))
        head = np.concatenate(
            [[0.0], np.geomspace(1e-30, s_sw, graded)[:-1], np.linspace(s_sw, 2.0, k + 1)[:-1]]
        )
    m = int(math.ceil((CC_KINK - 2.0) / h))
    body = np.linspace(2.0, CC_KINK, m + 1)
    grid = np.concatenate([head, body])
    return HalfLineProfile(grid, cc_base(grid) ** gam)


# ---------------------------------------------------------------- serialization


def write_profile(fh, profile: Profile, params: WeightParams):
    """Two-column text: header line, then ``knot value`` per line (repr floats)."""
    if isinstance(profile, RadialProfile):
        head = f"coords=ball R={profile.R!r}"
    else:
        head = f"coords=halfline S={profile.S!r}"
    fh.write(
        f"# weighted_mt profile {head} alpha={float(params.alpha)!r} "
        f"beta={float(params.beta)!r} sigma={params.sigma!r}\n"
    )
    for x, y in zip(profile.grid.tolist(), profile.values.tolist()):
        fh.write(f"{x!r} {y!r}\n")


def read_profile(fh):
    """Inverse of write_profile: returns (profile, params)."""
    header = fh.readline()
    if not header.startswith("# weighted_mt profile"):
        raise DomainError("not a profile file (missing header)")
    fields = dict(tok.split("=", 1) for tok in header.split()[3:])
    sigma = None if fields.get("sigma", "None") == "None" else float(fields["sigma"])
    params = WeightParams(float(fields["alpha"]), float(fields["beta"]), sigma)
    rows = [line.split() for line in fh if line.strip() and not line.startswith("#")]
    grid = [float(r[0]) for r in rows]
    vals = [float(r[1]) for r in rows]
    cls = RadialProfile if fields["coords"] == "ball" else HalfLineProfile
    return cls(grid, vals), params


def save_profile(path, profile: Profile, params: WeightParams):
    with open(path, "w") as fh:
        write_profile(fh, profile, params)


def load_profile(path):
    with open(path) as fh:
        return read_profile(fh)


def profile_to_text(profile: Profile, params: WeightParams) -> str:
    buf = io.StringIO()
    write_profile(buf, profile, params)
    return buf.getvalue()


def profile_from_text(text: str):
    return read_profile(io.StringIO(text))


__all__ = [
    "RadialProfile",
    "HalfLineProfile",
    "halfline_grid",
    "to_halfline",
    "from_halfline",
    "level_measure",
    "rearrange_decreasing",
    "moser_ball",
    "moser_halfline",
    "carleson_chang_test",
    "save_profile",
    "load_profile",
    "Path",
]

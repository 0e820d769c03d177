"""PNG renderings of CLI outputs (opt-in via ``--figures``)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

E = math.e


def _figure(width=6.0):
    fig, ax = plt.subplots(figsize=(width, width * 0.62), dpi=110)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return str(path)


def moser_sweep(rows, path, a_factor):
    fig, ax = _figure()
    ok = [r for r in rows if r["status"] == "ok"]
    n = [r["n"] for r in ok]
    ax.semilogy(n, [r["mt_integral"] for r in ok], "o-", ms=3, label="exponential integral")
    ax.semilogy(n, [max(r["eq214_lower_bound"], 1e-300) for r in ok], "--", label="Moser lower bound")
    ax.set_xlabel("n")
    ax.set_ylabel("value")
    ax.set_title(f"Moser sequence at a = {a_factor:g} a_sharp")
    ax.legend()
    return _save(fig, path)


def dichotomy(report, path):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6), dpi=110)
    for d in report.deltas:
        pts = [(t["m"], t["tail_energy"]) for t in report.tail_energies if t["delta"] == d]
        ax1.plot(*zip(*pts), "o-", ms=3, label=f"delta = {d:g}")
    ax1.axhline(report.concentration_tol, color="k", lw=0.8, ls=":")
    ax1.set_xlabel("member m")
    ax1.set_ylabel("energy outside B_delta")
    ax1.legend()
    ax2.plot(report.j_trajectory, "o-", ms=3, label="J")
    ax2.axhline(report.ceiling, color="r", lw=0.8, ls="--", label="ceiling")
    ax2.set_xlabel("member m")
    ax2.legend()
    fig.suptitle(f"verdict: {report.verdict}")
    for ax in (ax1, ax2):
        ax.grid(True, alpha=0.3)
    return _save(fig, path)


def extremal(result, path, reference=None):
    fig, ax = _figure()
    f = result.best_profile
    s = np.linspace(0.0, min(f.S, 30.0), 1500)
    ax.plot(s, f(s), label=f"best (I+1 = {result.best_I_plus_1:.5f})")
    if reference is not None:
        ax.plot(s, reference(s), "--", label="test profile")
    ax.set_xlabel("s")
    ax.set_ylabel("f(s)")
    ax.set_title(f"constrained maximizer, kappa = {result.kappa:g}")
    ax.legend()
    return _save(fig, path)


def feasibility(rows, path):
    fig, ax = _figure()
    al = np.array([r.alpha for r in rows])
    sg = np.array([r.sigma for r in rows])
    slack = np.array([r.bound - r.gamma_phi0 for r in rows])
    sc = ax.scatter(sg, al, c=slack, cmap="coolwarm", s=14)
    fig.colorbar(sc, ax=ax, label="1/c_sigma - Gamma(phi0)")
    ax.set_xlabel("sigma")
    ax.set_ylabel("alpha")
    return _save(fig, path)

"""Minimal SVG rendering of the two experiment figures.

The CSV files are the contract; these figures are a convenience. fig1 uses
a log y axis with median lines and shaded interquartile bands, fig2 plots
the empirical success rate against the theoretical one on a log x axis.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

_SERIES = ("err_alg1", "bound_f2", "err_alg2", "bound_f4")
_LABELS = {
    "err_alg1": "error (pooled)",
    "bound_f2": "bound f2 (data-dependent)",
    "err_alg2": "error (multi-trajectory)",
    "bound_f4": "bound f4 (data-independent)",
}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "specrad"
    return plt


def fig1_svg(path: str | Path, records) -> None:
    plt = _pyplot()
    grid = sorted({r.grid_value for r in records})
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for name in _SERIES:
        q1, q2, q3 = [], [], []
        for n in grid:
            vals = [r.values[name] for r in records if r.grid_value == n]
            lo, med, hi = np.percentile(vals, [25, 50, 75])
            q1.append(lo)
            q2.append(med)
            q3.append(hi)
        (line,) = ax.plot(grid, q2, marker="o", markersize=3, label=_LABELS[name])
        ax.fill_between(grid, q1, q3, alpha=0.2, color=line.get_color())
    ax.set_yscale("log")
    ax.set_xlabel("number of trajectories N")
    ax.set_ylabel("spectral radius error / bound")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def fig2_svg(path: str | Path, rows) -> None:
    plt = _pyplot()
    nq = [r[0] for r in rows]
    espr = [r[1] for r in rows]
    tspp = [r[2] for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(nq, espr, marker="o", markersize=3, label="ESPR")
    ax.plot(nq, tspp, marker="s", markersize=3, label="TSPP")
    ax.set_xscale("log")
    ax.set_xlabel("number of channel samples N_q")
    ax.set_ylabel("success probability")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)

"""Figure rendering for scenario outputs.

Each emitted CSV map gets a PNG twin: space-time maps as pcolormesh
panels (t horizontal, r vertical), scalar sweeps as line plots.  Uses the
Agg backend so runs are headless-safe.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_map(path: Path, r_values, t_values, values, title: str) -> None:
    rs = np.asarray(r_values, dtype=float)
    ts = np.asarray(t_values, dtype=float)
    vals = np.asarray(values, dtype=float)
    fig, ax = plt.subplots(figsize=(5.2, 3.6), constrained_layout=True)
    if len(ts) > 1 and len(rs) > 1:
        mesh = ax.pcolormesh(ts, rs, vals, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax)
    else:
        # degenerate axis: fall back to a curve
        if len(rs) == 1:
            ax.plot(ts, vals[0, :])
            ax.set_ylabel("value")
        else:
            ax.plot(rs, vals[:, 0])
            ax.set_ylabel("value")
    ax.set_xlabel("t")
    if len(ts) > 1 and len(rs) > 1:
        ax.set_ylabel("r")
    ax.set_title(title, fontsize=10)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_curves(path: Path, x, series: dict, xlabel: str, title: str,
                  logx: bool = False, logy: bool = False) -> None:
    x = np.asarray(x, dtype=float)
    fig, ax = plt.subplots(figsize=(5.2, 3.6), constrained_layout=True)
    for label, y in series.items():
        ax.plot(x, np.asarray(y, dtype=float), label=label)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.legend(fontsize=8)
    ax.set_title(title, fontsize=10)
    fig.savefig(path, dpi=150)
    plt.close(fig)

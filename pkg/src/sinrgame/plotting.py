"""Figures written straight to files (no display backend needed)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np
from matplotlib import rc_context
from matplotlib.figure import Figure

from .analysis import BraessReport
from .noregret import History, running_value

_MAX_POINTS = 2000


def plot_running_values(histories: Sequence[History], path, title: str = "") -> Path:
    """Running average of the number of successful links, one curve per history."""
    fig = Figure(figsize=(7, 4))
    ax = fig.add_subplot()
    for h in histories:
        curve = running_value(h)
        step = max(1, len(curve) // _MAX_POINTS)
        t = np.arange(1, len(curve) + 1)[::step]
        ax.plot(t, curve[::step], lw=1.2, label=f"{h.setting.name} {h.label}".strip())
    ax.set_xscale("log")
    ax.set_xlabel("round")
    ax.set_ylabel("average successful links")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    if histories:
        ax.legend(fontsize=7)
    return _save(fig, path)


def plot_report(report: BraessReport, path) -> Path:
    """Certified value range per setting, with OPT where it was computed."""
    names = list(report.settings)
    lo = [report.settings[k].min_value for k in names]
    hi = [report.settings[k].max_value for k in names]
    opt = [report.settings[k].opt for k in names]
    x = np.arange(len(names))
    fig = Figure(figsize=(1.6 * len(names) + 3, 4))
    ax = fig.add_subplot()
    ax.bar(x - 0.18, [v or 0 for v in lo], 0.36, label="worst certified")
    ax.bar(x + 0.18, [v or 0 for v in hi], 0.36, label="best certified")
    for k, o in enumerate(opt):
        if o is not None:
            ax.plot([k - 0.4, k + 0.4], [o, o], color="k", lw=1.5, label="OPT" if k == 0 else None)
    ax.set_xticks(x, names)
    ax.set_ylabel("successful links per round")
    ax.set_title(f"{report.name} (delta = {report.delta:.3g})")
    ax.legend(fontsize=8)
    ax.grid(axis="y", alpha=0.3)
    return _save(fig, path)


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps repeated renders byte-identical
    with rc_context({"svg.hashsalt": "sinrgame"}):
        fig.savefig(path, dpi=120, bbox_inches="tight", metadata=_metadata(path))
    return path


def _metadata(path: Path) -> dict:
    if path.suffix.lower() == ".png":
        return {"Software": None}
    if path.suffix.lower() == ".pdf":
        return {"Creator": None, "Producer": None, "CreationDate": None}
    if path.suffix.lower() == ".svg":
        return {"Date": None, "Creator": None}
    return {}

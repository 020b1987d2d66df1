"""Render sweep curves to image files alongside the CSV output."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .sweep import SweepRow

COLUMN_LABELS = {
    "p_g2": r"final population of $g_2$",
    "p_g1": r"final population of $g_1$",
    "purity": "purity of the final reduced state",
    "jz_var": r"$\sigma^2(J_z)$ at the end of the pulse",
}

PRESET_COLUMNS = {
    "fig3a": "p_g2",
    "fig3b": "purity",
    "fig3c": "jz_var",
    "fig4": "p_g2",
    "fig5": "p_g2",
}


def plot_curves(
    curves: Sequence[tuple[str, Sequence[SweepRow]]],
    column: str,
    path,
    title: str | None = None,
) -> Path:
    """One marker-line per labeled row list, coupling on a log axis."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, rows in curves:
        ok = [r for r in rows if r.status == "ok"]
        ax.plot(
            [r.eta for r in ok],
            [getattr(r, column) for r in ok],
            marker="o",
            markersize=3,
            linewidth=1.2,
            label=label,
        )
    ax.set_xscale("log")
    ax.set_xlabel(r"coupling $\eta$  (units of $1/T$)")
    ax.set_ylabel(COLUMN_LABELS.get(column, column))
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def preset_figure(name: str, curves: Sequence[tuple[str, Sequence[SweepRow]]], path) -> Path:
    """The figure conventionally associated with a preset name."""
    return plot_curves(curves, PRESET_COLUMNS[name], path, title=name)

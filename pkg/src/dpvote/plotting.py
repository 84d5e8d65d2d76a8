"""Line charts of sweep rows, written to image files next to the CSV."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from dpvote.experiments import CurveRow  # noqa: E402

_TITLES = {
    "fig2": "Three-way upper bounds, partner level 1",
    "fig3": r"$\beta$-Pareto efficiency under $\epsilon$-DP",
    "fig4": r"$\gamma$-SD-efficiency under $\epsilon$-DP",
    "fig5": r"$\alpha$-Condorcet vs $\eta$-Condorcet loser (upper bounds)",
    "fig6": r"$\gamma$-SD vs $\alpha$-Condorcet (upper bounds)",
    "fig7": r"$\gamma$-SD vs $\eta$-Condorcet loser (upper bounds)",
    "fig8": r"$\beta$-Pareto vs $\gamma$-SD (upper bounds)",
    "mixture": r"CWRR/CLRR mixture: $\alpha$ vs $\eta$",
    "natural": r"Bound on $\alpha\beta^{m-2}$: three-way vs product of optima",
}

_SYMBOL = {"alpha": r"$\alpha$", "beta": r"$\beta$", "gamma": r"$\gamma$", "eta": r"$\eta$", "epsilon": r"$\epsilon$"}


def render(rows: Sequence[CurveRow], path: str | Path, title: str | None = None) -> Path:
    """Plot one line per series; the file format follows the extension."""
    if not rows:
        raise ValueError("nothing to plot")
    path = Path(path)
    plt.rcParams["svg.hashsalt"] = "dpvote"
    fig, ax = plt.subplots(figsize=(6, 4.5))
    series: dict[str, tuple[list[float], list[float]]] = {}
    for r in rows:
        xs, ys = series.setdefault(r.series, ([], []))
        xs.append(r.x_value)
        ys.append(r.y_value)
    for label, (xs, ys) in series.items():
        ax.plot(xs, ys, label=label, linewidth=1.4)
    ax.set_xlabel(_SYMBOL.get(rows[0].x_name, rows[0].x_name))
    ax.set_ylabel(_SYMBOL.get(rows[0].y_name, rows[0].y_name))
    ax.set_title(title or _TITLES.get(rows[0].sweep, rows[0].sweep))
    ax.grid(True, alpha=0.3)
    if len(series) <= 12:
        ax.legend(fontsize=8)
    fig.tight_layout()
    metadata = {"Date": None} if path.suffix.lower() == ".svg" else None
    fig.savefig(path, metadata=metadata)
    plt.close(fig)
    return path

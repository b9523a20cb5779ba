"""Matplotlib rendering for the verification-grid figures.

Each figure is drawn straight from the delimited rows the grid check emits,
so the plotted curves and the CSV are always the same data.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

FIGURE_IDS = ("phi", "eta", "mangoldt", "mangoldt2", "primesum2", "primesum3")

# figure name -> grid-check inequality id
FIGURE_TO_INEQUALITY = {
    "phi": "phi_ineq",
    "eta": "eta_monotone",
    "mangoldt": "sharp",
    "mangoldt2": "sharp2",
    "primesum2": "om2",
    "primesum3": "analytic",
}

_STYLES = {
    "phi": dict(
        title="Dirichlet-series bound discrepancies",
        xlabel="u",
        ylabel="bound minus series",
        curves=lambda cols, data: [
            (data[0], data[1] - data[3], "log2/(2^u-1) gap"),
            (data[0], data[2] - data[3], "1/u gap"),
        ],
        logy=True,
    ),
    "eta": dict(
        title="Alternating zeta function on the real axis",
        xlabel="s",
        ylabel="eta(s)",
        curves=lambda cols, data: [(data[0], data[1], "eta")],
        logy=False,
    ),
    "mangoldt": dict(
        title="Weighted Mangoldt sum against its layered bounds (m = 2^x)",
        xlabel="x",
        ylabel="value",
        curves=lambda cols, data: [
            (data[0], data[1], "weighted sum (upper)"),
            (data[0], data[2], "series bound"),
            (data[0], data[3], "x/(x+1/2)"),
            (data[0], data[4], "1"),
        ],
        logy=False,
    ),
    "mangoldt2": dict(
        title="Shifted Mangoldt sum against 1/log(2m) (m = 2^x)",
        xlabel="x",
        ylabel="value",
        curves=lambda cols, data: [
            (data[0], data[1], "shifted sum (upper)"),
            (data[0], data[2], "1/log(2m)"),
        ],
        logy=False,
    ),
    "primesum2": dict(
        title="Odd-prime ratio series times u",
        xlabel="u",
        ylabel="value",
        curves=lambda cols, data: [
            (data[0], data[1], "u * sum (upper)"),
            (data[0], data[2], "1"),
        ],
        logy=False,
    ),
    "primesum3": dict(
        title="Certified inequality: both sides",
        xlabel="u",
        ylabel="value",
        curves=lambda cols, data: [
            (data[0], data[1], "lhs"),
            (data[0], data[2], "rhs"),
        ],
        logy=False,
    ),
}


def render_figure(figure_id: str, report, png_path: str, dpi: int = 150) -> None:
    """Render one grid report to a PNG file."""
    if figure_id not in _STYLES:
        raise ValueError(f"unknown figure {figure_id!r}")
    import numpy as np

    style = _STYLES[figure_id]
    data = [np.array([row[i] for row in report.rows]) for i in range(len(report.columns))]
    fig, ax = plt.subplots(figsize=(7.5, 5.0))
    for xs, ys, label in style["curves"](report.columns, data):
        ax.plot(xs, ys, label=label, linewidth=1.4)
    if style["logy"]:
        ax.set_yscale("log")
    ax.set_xlabel(style["xlabel"])
    ax.set_ylabel(style["ylabel"])
    ax.set_title(style["title"])
    ax.legend(fontsize=9)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(png_path, dpi=dpi)
    plt.close(fig)

"""SVG renderings of the pipeline's intermediate surfaces.

All figures are written through the Agg backend with a fixed hash salt and no
date metadata, so repeated runs produce identical files.
"""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "coresat"

import matplotlib.pyplot as plt

from .rbf import RbfModel, evaluate
from .segmentation import EcdfCurve, KinkPoint
from .seriation import SeriatedMatrix

_SVG_KW = {"format": "svg", "metadata": {"Date": None}}


def save_heatmap(sm: SeriatedMatrix, path, title: str = "") -> None:
    """Seriated distance heatmap, small = white to large = black."""
    fig, ax = plt.subplots(figsize=(6, 5.4))
    im = ax.imshow(sm.d_norm, cmap="gray_r", vmin=0.0, vmax=1.0, origin="upper")
    ax.set_xticks(range(sm.size))
    ax.set_yticks(range(sm.size))
    ax.set_xticklabels(sm.labels, rotation=90, fontsize=5)
    ax.set_yticklabels(sm.labels, fontsize=5)
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, label="normalized distance")
    fig.tight_layout()
    fig.savefig(path, **_SVG_KW)
    plt.close(fig)


def save_surface_contours(
    model: RbfModel,
    n: int,
    path,
    d_bound: float | None = None,
    title: str = "",
    resolution: int = 200,
) -> None:
    """Modeled height profile with dashed contours every 0.2 units.

    The d_bound contour, when given, is drawn solid and annotated: it is the
    line that delimits the core block.
    """
    grid = np.linspace(1.0, float(n), resolution)
    xx, yy = np.meshgrid(grid, grid, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    zz = np.asarray(evaluate(model, pts)).reshape(resolution, resolution)

    fig, ax = plt.subplots(figsize=(6, 5.4))
    im = ax.imshow(
        zz,
        cmap="gray_r",
        origin="upper",
        extent=(1, n, n, 1),
        vmin=min(0.0, float(zz.min())),
        vmax=max(1.0, float(zz.max())),
    )
    levels = np.arange(0.0, 1.01, 0.2)
    cs = ax.contour(yy, xx, zz, levels=levels, colors="white", linestyles="dashed", linewidths=0.8)
    ax.clabel(cs, fontsize=6, fmt="%.1f")
    if d_bound is not None:
        cs2 = ax.contour(yy, xx, zz, levels=[d_bound], colors="lightgrey", linewidths=2.0)
        ax.clabel(cs2, fontsize=7, fmt="%.3f")
    if title:
        ax.set_title(title)
    ax.set_xlabel("matrix column")
    ax.set_ylabel("matrix row")
    fig.colorbar(im, ax=ax, label="modeled height")
    fig.tight_layout()
    fig.savefig(path, **_SVG_KW)
    plt.close(fig)


def save_ecdf(
    curve: EcdfCurve,
    path,
    kink: KinkPoint | None = None,
    window: tuple[float, float] | None = None,
    title: str = "",
) -> None:
    """ECDF of the normalized distances with the detected kink marked."""
    fig, ax = plt.subplots(figsize=(6, 4.2))
    ax.step(curve.sorted_values, curve.probabilities, where="post", lw=1.2)
    if window is not None:
        for p in window:
            ax.axhline(p, color="grey", ls=":", lw=0.8)
    if kink is not None:
        ax.plot([kink.value], [kink.p], "o", color="crimson", ms=6)
        ax.annotate(
            f"kink p={kink.p:.2f}, d={kink.value:.3f}",
            xy=(kink.value, kink.p),
            xytext=(10, -14),
            textcoords="offset points",
            fontsize=8,
        )
    ax.set_xlabel("normalized DTW distance")
    ax.set_ylabel("empirical probability")
    ax.set_ylim(0.0, 1.02)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SVG_KW)
    plt.close(fig)

"""Renderers turning harness CSVs into raster figures.

Batch scripts only, so the Agg backend is forced before pyplot loads.
Conventions shared by all figure kinds:

- heatmap-style panels put function pairs on the x axis and alpha on the y
  axis, ascending bottom to top (``imshow(origin="lower")``);
- AUC color scales are viridis pinned to [0, 1] so panels stay comparable
  across algorithms and figures;
- convergence values are log-scaled on y;
- ERT points that never reached the target (``inf``) are dropped from the
  scatter and counted in a per-panel annotation.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
from matplotlib.lines import Line2D
from matplotlib.patches import Patch

from .schema import LandscapeData, load_landscape, load_table

KINDS = (
    "heatmap",
    "rankgrid",
    "ert_scatter",
    "auc_grid",
    "auc_scatter",
    "convergence",
    "landscape",
)

# which CSV schema each single-input figure kind consumes
TABLE_FOR_KIND = {
    "heatmap": "auc",
    "rankgrid": "rank",
    "ert_scatter": "ert",
    "auc_grid": "auc",
    "auc_scatter": "auc",
    "convergence": "traj",
}

_AUC_CMAP = "viridis"
_ALG_COLORS = plt.get_cmap("tab10").colors
_LINESTYLES = ("-", "--", "-.", ":")


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render: kind, input CSV path(s), output image path."""

    kind: str
    inputs: tuple[str, ...]
    output: str
    title: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        if self.kind != "landscape" and len(self.inputs) != 1:
            raise ValueError(f"{self.kind} takes exactly one input CSV")
        if not self.output:
            raise ValueError("output path is required")


def _pair_label(f_first: int, f_second: int) -> str:
    return f"F{f_first}/F{f_second}"


def _pairs_of(df: pd.DataFrame) -> list[tuple[int, int]]:
    return sorted(set(zip(df["f_first"], df["f_second"])))


def _alg_color(algs: list[str]) -> dict[str, tuple]:
    return {alg: _ALG_COLORS[i % len(_ALG_COLORS)] for i, alg in enumerate(algs)}


def _panel_grid(n: int, ncols: int = 3, width: float = 3.4, height: float = 2.9):
    cols = min(ncols, n)
    rows = math.ceil(n / cols)
    fig, axes = plt.subplots(
        rows, cols, figsize=(width * cols, height * rows),
        squeeze=False, constrained_layout=True,
    )
    flat = axes.ravel()
    for ax in flat[n:]:
        ax.set_visible(False)
    return fig, flat[:n]


def build_heatmap(df: pd.DataFrame, title: str | None = None):
    """Pooled-AUC heatmap: function pairs on x, alpha ascending upward on y."""
    pooled = (
        df.groupby(["alg", "f_first", "f_second", "alpha"], sort=True)["auc"]
        .mean()
        .reset_index()
    )
    algs = sorted(pooled["alg"].unique())
    pairs = _pairs_of(pooled)
    alphas = sorted(pooled["alpha"].unique())
    pair_idx = {p: i for i, p in enumerate(pairs)}
    alpha_idx = {a: i for i, a in enumerate(alphas)}

    width = max(3.2, 0.55 * len(pairs) + 2.0)
    height = max(2.8, 0.28 * len(alphas) + 1.4)
    fig, axes = plt.subplots(
        1, len(algs), figsize=(width * len(algs) + 1.0, height),
        squeeze=False, constrained_layout=True,
    )
    im = None
    for ax, alg in zip(axes[0], algs):
        matrix = np.full((len(alphas), len(pairs)), np.nan)
        for row in pooled[pooled["alg"] == alg].itertuples():
            matrix[alpha_idx[row.alpha], pair_idx[(row.f_first, row.f_second)]] = row.auc
        # origin="lower" keeps alpha ascending bottom to top
        im = ax.imshow(
            matrix, origin="lower", aspect="auto",
            cmap=_AUC_CMAP, vmin=0.0, vmax=1.0, interpolation="nearest",
        )
        ax.set_xticks(range(len(pairs)))
        ax.set_xticklabels(
            [_pair_label(*p) for p in pairs],
            rotation=45 if len(pairs) > 6 else 0, ha="right" if len(pairs) > 6 else "center",
        )
        ax.set_yticks(range(len(alphas)))
        ax.set_yticklabels([f"{a:g}" for a in alphas])
        ax.set_xlabel("function pair")
        ax.set_title(alg)
    axes[0, 0].set_ylabel("alpha")
    fig.colorbar(im, ax=axes.ravel().tolist(), label="AUC", fraction=0.08)
    fig.suptitle(title or "Runtime profile AUC")
    return fig


def build_rankgrid(df: pd.DataFrame, title: str | None = None):
    """Best-algorithm grid: winning algorithm per (pair, alpha) cell."""
    winners: dict[tuple[tuple[int, int], float], str] = {}
    for (a, b, alpha), sub in df.groupby(["f_first", "f_second", "alpha"]):
        top = sub[sub["rank"] == sub["rank"].min()]
        winners[((a, b), alpha)] = "+".join(sorted(top["alg"]))
    pairs = sorted({p for p, _ in winners})
    alphas = sorted({a for _, a in winners})
    labels = sorted(set(winners.values()))
    label_idx = {lab: i for i, lab in enumerate(labels)}
    colors = [_ALG_COLORS[i % len(_ALG_COLORS)] for i in range(len(labels))]

    matrix = np.full((len(alphas), len(pairs)), np.nan)
    for (pair, alpha), lab in winners.items():
        matrix[alphas.index(alpha), pairs.index(pair)] = label_idx[lab]

    width = max(3.6, 0.8 * len(pairs) + 2.0)
    height = max(2.8, 0.3 * len(alphas) + 1.4)
    fig, ax = plt.subplots(figsize=(width + 1.6, height), constrained_layout=True)
    cmap = matplotlib.colors.ListedColormap(colors)
    ax.imshow(
        matrix, origin="lower", aspect="auto", cmap=cmap,
        vmin=-0.5, vmax=len(labels) - 0.5, interpolation="nearest",
    )
    ax.set_xticks(range(len(pairs)))
    ax.set_xticklabels([_pair_label(*p) for p in pairs])
    ax.set_yticks(range(len(alphas)))
    ax.set_yticklabels([f"{a:g}" for a in alphas])
    ax.set_xlabel("function pair")
    ax.set_ylabel("alpha")
    handles = [Patch(facecolor=colors[i], label=lab) for i, lab in enumerate(labels)]
    ax.legend(handles=handles, loc="center left", bbox_to_anchor=(1.02, 0.5),
              title="best by AUC", fontsize=8)
    fig.suptitle(title or "Best algorithm per cell")
    return fig


def build_ert_scatter(df: pd.DataFrame, title: str | None = None):
    """Per-instance ERT scatter vs alpha; unreached runs are annotated, not drawn."""
    pairs = _pairs_of(df)
    algs = sorted(df["alg"].unique())
    color = _alg_color(algs)
    targets = sorted(df["target"].unique())
    fig, axes = _panel_grid(len(pairs))
    for ax, pair in zip(axes, pairs):
        sub = df[(df["f_first"] == pair[0]) & (df["f_second"] == pair[1])]
        finite = sub[np.isfinite(sub["ert"])]
        misses = len(sub) - len(finite)
        # scale first: a panel whose runs all missed has nothing to autoscale
        ax.set_yscale("log")
        for alg in algs:
            rows = finite[finite["alg"] == alg]
            if len(rows):
                ax.scatter(rows["alpha"], rows["ert"], s=20, color=color[alg],
                           alpha=0.8, label=alg)
        ax.set_xlabel("alpha")
        ax.set_title(_pair_label(*pair))
        if misses:
            ax.annotate(f"{misses} unreached", xy=(0.02, 0.97),
                        xycoords="axes fraction", va="top", fontsize=8)
    axes[0].set_ylabel("ERT (evaluations)")
    handles = [Line2D([], [], marker="o", ls="none", color=color[a], label=a)
               for a in algs]
    fig.legend(handles=handles, loc="outside upper right", fontsize=8)
    target_text = ", ".join(f"{t:g}" for t in targets)
    fig.suptitle(title or f"ERT to target {target_text}")
    return fig


def build_auc_grid(df: pd.DataFrame, title: str | None = None):
    """Facet grid of pooled AUC vs alpha, one panel per function pair."""
    pooled = (
        df.groupby(["alg", "f_first", "f_second", "alpha"], sort=True)["auc"]
        .mean()
        .reset_index()
    )
    pairs = _pairs_of(pooled)
    algs = sorted(pooled["alg"].unique())
    color = _alg_color(algs)
    fig, axes = _panel_grid(len(pairs))
    for ax, pair in zip(axes, pairs):
        sub = pooled[(pooled["f_first"] == pair[0]) & (pooled["f_second"] == pair[1])]
        for alg in algs:
            rows = sub[sub["alg"] == alg].sort_values("alpha")
            ax.plot(rows["alpha"], rows["auc"], marker="o", ms=3.5,
                    color=color[alg], label=alg)
        ax.set_ylim(-0.02, 1.02)
        ax.set_xlabel("alpha")
        ax.set_title(_pair_label(*pair))
    axes[0].set_ylabel("AUC")
    handles = [Line2D([], [], color=color[a], marker="o", ms=3.5, label=a) for a in algs]
    fig.legend(handles=handles, loc="outside upper right", fontsize=8)
    fig.suptitle(title or "Pooled AUC vs alpha")
    return fig


def build_auc_scatter(df: pd.DataFrame, title: str | None = None):
    """Per-instance AUC scatter vs alpha, one panel per function pair."""
    pairs = _pairs_of(df)
    algs = sorted(df["alg"].unique())
    color = _alg_color(algs)
    instances = sorted(df["instance"].unique())
    span = max(df["alpha"].max() - df["alpha"].min(), 1.0)
    # deterministic per-instance offset so overlapping points stay visible
    offset = {
        inst: (i - (len(instances) - 1) / 2) * 0.008 * span
        for i, inst in enumerate(instances)
    }
    fig, axes = _panel_grid(len(pairs))
    for ax, pair in zip(axes, pairs):
        sub = df[(df["f_first"] == pair[0]) & (df["f_second"] == pair[1])]
        for alg in algs:
            rows = sub[sub["alg"] == alg]
            xs = rows["alpha"] + rows["instance"].map(offset)
            ax.scatter(xs, rows["auc"], s=16, color=color[alg], alpha=0.7,
                       edgecolors="none", label=alg)
        ax.set_ylim(-0.02, 1.02)
        ax.set_xlabel("alpha")
        ax.set_title(_pair_label(*pair))
    axes[0].set_ylabel("AUC")
    handles = [Line2D([], [], marker="o", ls="none", color=color[a], label=a)
               for a in algs]
    fig.legend(handles=handles, loc="outside upper right", fontsize=8)
    fig.suptitle(title or "Per-instance AUC")
    return fig


def build_convergence(df: pd.DataFrame, title: str | None = None):
    """Geometric-mean convergence curves, log-scaled y, colored by alpha."""
    pairs = _pairs_of(df)
    algs = sorted(df["alg"].unique())
    cmap = plt.get_cmap(_AUC_CMAP)
    fig, axes = _panel_grid(len(pairs))
    for ax, pair in zip(axes, pairs):
        sub = df[(df["f_first"] == pair[0]) & (df["f_second"] == pair[1])]
        for ai, alg in enumerate(algs):
            style = _LINESTYLES[ai % len(_LINESTYLES)]
            for alpha, rows in sub[sub["alg"] == alg].groupby("alpha"):
                rows = rows.sort_values("evals")
                ax.plot(rows["evals"], rows["geomean"], ls=style,
                        color=cmap(float(alpha)), lw=1.2)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("evaluations")
        ax.set_title(_pair_label(*pair))
    axes[0].set_ylabel("geometric mean best value")
    sm = plt.cm.ScalarMappable(cmap=cmap, norm=matplotlib.colors.Normalize(0.0, 1.0))
    fig.colorbar(sm, ax=list(axes), label="alpha", fraction=0.05)
    if len(algs) > 1:
        handles = [Line2D([], [], color="black", ls=_LINESTYLES[i % len(_LINESTYLES)],
                          label=a) for i, a in enumerate(algs)]
        fig.legend(handles=handles, loc="outside upper right", fontsize=8)
    fig.suptitle(title or "Geometric-mean convergence")
    return fig


_LANDSCAPE_NAME = re.compile(r"landscape_f(\d+)_f(\d+)_a([0-9.]+)")


def _landscape_title(source: str) -> str:
    stem = os.path.splitext(os.path.basename(source))[0]
    match = _LANDSCAPE_NAME.match(stem)
    if match is None:
        return stem
    a, b, alpha = match.groups()
    return f"F{a}/F{b} alpha={float(alpha):g}"


def build_landscape(datasets: list[LandscapeData], title: str | None = None):
    """Landscape heat frames with an optimum circle and best-point crosses."""
    fig, axes = _panel_grid(len(datasets), ncols=4, width=3.4, height=3.2)
    mesh = None
    for ax, data in zip(axes, datasets):
        xs, ys, grid = data.grid()
        mesh = ax.pcolormesh(xs, ys, grid, shading="nearest", cmap=_AUC_CMAP)
        if data.best:
            bx = [p[0] for p in data.best]
            by = [p[1] for p in data.best]
            ax.plot(bx, by, "x", color="white", ms=6, mew=1.3)
        if data.optimum is not None:
            ax.plot(*data.optimum, marker="o", ls="none", ms=11,
                    mfc="none", mec="red", mew=1.8)
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title(_landscape_title(data.source))
    fig.colorbar(mesh, ax=list(axes), label="log10 value", fraction=0.05)
    if title:
        fig.suptitle(title)
    return fig


_BUILDERS = {
    "heatmap": build_heatmap,
    "rankgrid": build_rankgrid,
    "ert_scatter": build_ert_scatter,
    "auc_grid": build_auc_grid,
    "auc_scatter": build_auc_scatter,
    "convergence": build_convergence,
}


def render(spec: FigureSpec) -> str:
    """Render one figure spec to its output image path and return the path."""
    if spec.kind == "landscape":
        fig = build_landscape([load_landscape(p) for p in spec.inputs], title=spec.title)
    else:
        df = load_table(spec.inputs[0], TABLE_FOR_KIND[spec.kind])
        fig = _BUILDERS[spec.kind](df, title=spec.title)
    out_dir = os.path.dirname(spec.output)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    try:
        fig.savefig(spec.output, dpi=150)
    finally:
        plt.close(fig)
    return spec.output

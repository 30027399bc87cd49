"""Report figures written next to the tabular output."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .fuzzy import LinguisticVariable  # noqa: E402
from .model import AssessmentResult, ModelConfig  # noqa: E402
from .validation import ConfusionMatrix  # noqa: E402

LEVEL_COLORS = {"LOW": "#c0392b", "MED": "#e6a817", "HIGH": "#27ae60"}


def _draw_variable(ax, var: LinguisticVariable, title: str | None = None):
    lo, hi = var.universe
    x = np.linspace(lo, hi, 1001)
    for name, _ in var.levels:
        y = [var.degree(name, v) for v in x]
        ax.plot(x, y, label=name, color=LEVEL_COLORS.get(name), lw=1.6)
    ax.set_xlim(lo, hi)
    ax.set_ylim(-0.02, 1.05)
    ax.set_title(title or var.name, fontsize=10)
    ax.set_ylabel("membership")


def plot_model(cfg: ModelConfig, path) -> Path:
    """Membership functions of every metric and every characteristic output."""
    panels = [(m.variable, f"{m.name} ({m.unit})" if m.unit else m.name) for m in cfg.metrics]
    panels += [(c.output, f"{c.name} score") for c in cfg.characteristics]
    ncols = 2
    nrows = -(-len(panels) // ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(10, 2.6 * nrows), squeeze=False)
    for ax, (var, title) in zip(axes.flat, panels):
        _draw_variable(ax, var, title)
    for ax in axes.flat[len(panels):]:
        ax.set_visible(False)
    axes.flat[0].legend(loc="upper right", fontsize=8, frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_scores(results: Sequence[AssessmentResult], path) -> Path:
    """Horizontal maintainability bars with the refactoring threshold marked."""
    names = [r.service for r in results]
    scores = [r.maintainability for r in results]
    colors = ["#c0392b" if r.needs_refactoring else "#5d6d7e" for r in results]
    fig, ax = plt.subplots(figsize=(8, 0.28 * len(results) + 1.2))
    ax.barh(range(len(results)), scores, color=colors)
    ax.set_yticks(range(len(results)), names, fontsize=7)
    ax.invert_yaxis()
    threshold = results[0].threshold
    ax.axvline(threshold, color="k", ls="--", lw=1)
    ax.text(threshold, -0.8, f" threshold {threshold:g}", fontsize=8, va="bottom")
    ax.set_xlim(0, 100)
    ax.set_xlabel("maintainability score")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_confusion(cm: ConfusionMatrix, path) -> Path:
    grid = np.array([[cm.tp, cm.fp], [cm.fn, cm.tn]])
    fig, ax = plt.subplots(figsize=(3.6, 3.2))
    ax.imshow(grid, cmap="Blues")
    for (i, j), v in np.ndenumerate(grid):
        ax.text(j, i, str(v), ha="center", va="center",
                color="white" if v > grid.max() / 2 else "black")
    ax.set_xticks([0, 1], ["LOW", "not LOW"])
    ax.set_yticks([0, 1], ["flagged", "not flagged"])
    ax.set_xlabel("evaluators")
    ax.set_ylabel("model")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path

"""Figures written next to the delimited reports. Agg backend only."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

if TYPE_CHECKING:
    from unrest.evaluation import RocCurve

STYLE = {
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 120,
    "savefig.bbox": "tight",
}


def _save(fig, path: str | Path) -> Path:
    # dropping the Software tag keeps reruns byte-stable across matplotlib patch releases
    path = Path(path)
    fig.savefig(path, metadata={"Software": None} if path.suffix == ".png" else None)
    plt.close(fig)
    return path


def plot_roc(curves: Mapping[str, "RocCurve"], path: str | Path, title: str | None = None) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        ax.plot([0, 1], [0, 1], ls="--", lw=0.8, color="0.6")
        for name, c in curves.items():
            ax.plot(c.fpr, c.tpr, lw=1.6, label=f"{name} (AUC = {100 * c.auc:.2f}%)")
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1.01)
        ax.set_xlabel("False positive rate")
        ax.set_ylabel("True positive rate")
        if title:
            ax.set_title(title)
        ax.legend(loc="lower right", frameon=False)
        return _save(fig, path)


def plot_daily(reports: Sequence, path: str | Path, title: str | None = None) -> Path:
    """TPR / TNR / accuracy per prediction day."""
    labels = [r.date.strftime("%b %d") for r in reports]
    x = np.arange(len(reports))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(reports) + 2), 3.2))
        for attr, marker in (("tpr", "o"), ("tnr", "s"), ("accuracy", "^")):
            ax.plot(x, [100 * getattr(r, attr) for r in reports], marker=marker, label=attr.upper())
        ax.set_xticks(x, labels)
        ax.set_ylim(-2, 102)
        ax.set_ylabel("%")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False, ncol=3, loc="lower center")
        return _save(fig, path)


def plot_correlation(C: np.ndarray, names: Sequence[str], path: str | Path) -> Path:
    with plt.rc_context({**STYLE, "axes.grid": False}):
        fig, ax = plt.subplots(figsize=(5, 4.4))
        im = ax.imshow(C, vmin=-1, vmax=1, cmap="RdBu_r")
        ax.set_xticks(range(len(names)), names)
        ax.set_yticks(range(len(names)), names)
        for i in range(len(names)):
            for j in range(len(names)):
                ax.text(j, i, f"{C[i, j]:.2f}", ha="center", va="center", fontsize=7)
        fig.colorbar(im, ax=ax, shrink=0.8, label="Pearson r")
        return _save(fig, path)


def plot_inclusion(percentages: Mapping[str, float], path: str | Path) -> Path:
    names = list(percentages)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3))
        ax.bar(names, [percentages[n] for n in names], color="tab:blue")
        ax.set_ylim(0, 100)
        ax.set_ylabel("folds selecting feature (%)")
        return _save(fig, path)


def plot_signals(triggers: Sequence, path: str | Path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(7, 3))
        starts = [t.window_start for t in triggers]
        counts = [t.keyword_count for t in triggers]
        ax.plot(starts, counts, lw=1.0)
        fired = [t for t in triggers if t.fired]
        if fired:
            ax.scatter([t.window_start for t in fired], [t.keyword_count for t in fired],
                       s=10, color="tab:red", zorder=3, label="fired")
            ax.legend(frameon=False)
        if triggers:
            ax.axhline(triggers[0].threshold, ls="--", lw=0.8, color="0.5")
        ax.set_ylabel("keyword tweets / window")
        fig.autofmt_xdate()
        return _save(fig, path)

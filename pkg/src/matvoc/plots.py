"""Matplotlib figure rendering for the report-producing CLI paths."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .evalkit import FrequencyHistogram, VocabStats  # noqa: E402
from .fileio import atomic_rename_into_place  # noqa: E402

_FIGSIZE = (7.0, 4.33)  # golden-ratio-ish


def _atomic_savefig(fig, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    fig.savefig(tmp, dpi=150, format="png")
    plt.close(fig)
    atomic_rename_into_place(tmp, path)


def _bin_labels(hist: FrequencyHistogram) -> list[str]:
    labels = [f"<{hist.bins[0]:g}"]
    labels.extend(
        f"[{lo:g},{hi:g})" for lo, hi in zip(hist.bins, hist.bins[1:])
    )
    labels.append(f">={hist.bins[-1]:g}")
    return labels


def save_histogram_figure(hist: FrequencyHistogram, path: str | Path) -> None:
    """Side-by-side bars of material vs general word counts per frequency bin."""
    labels = _bin_labels(hist)
    x = range(len(labels))
    width = 0.4
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.bar([i - width / 2 for i in x], hist.material, width, label="material words")
    ax.bar([i + width / 2 for i in x], hist.general, width, label="general words")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_xlabel("word frequency bin")
    ax.set_ylabel("word count")
    ax.legend()
    fig.tight_layout()
    _atomic_savefig(fig, path)


def save_sweep_figure(
    lams: Sequence[float], stats: Sequence[VocabStats], path: str | Path
) -> None:
    """Material token ratio and mean token length as functions of lambda."""
    fig, ax_ratio = plt.subplots(figsize=_FIGSIZE)
    ax_ratio.plot(lams, [s.material_token_ratio for s in stats], "o-", color="tab:blue")
    ax_ratio.set_xlabel("lambda")
    ax_ratio.set_ylabel("material token ratio", color="tab:blue")
    ax_ratio.tick_params(axis="y", labelcolor="tab:blue")
    ax_len = ax_ratio.twinx()
    ax_len.plot(lams, [s.mean_token_length for s in stats], "s--", color="tab:red")
    ax_len.set_ylabel("mean token length", color="tab:red")
    ax_len.tick_params(axis="y", labelcolor="tab:red")
    fig.tight_layout()
    _atomic_savefig(fig, path)

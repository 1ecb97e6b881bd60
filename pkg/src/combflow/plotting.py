"""Matplotlib figures for the verification report.

Import order matters: the Agg backend must be selected before pyplot loads,
so this module is the only place pyplot is imported from.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = [
    "save_ecdf_comparison",
    "save_series",
    "save_bar",
    "save_error_grid",
]

_DPI = 150


def _finish(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_ecdf_comparison(path: str, a, b, label_a: str, label_b: str, title: str) -> None:
    """Overlay of two empirical CDFs."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for data, label in ((a, label_a), (b, label_b)):
        x = np.sort(np.asarray(data, dtype=float))
        ax.step(x, np.arange(1, len(x) + 1) / len(x), where="post", label=label, lw=1)
    ax.set_xlabel("value")
    ax.set_ylabel("ECDF")
    ax.set_title(title)
    ax.legend()
    _finish(fig, path)


def save_series(path: str, xs, ys, xlabel: str, ylabel: str, title: str, logx: bool = False) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, marker="o")
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    _finish(fig, path)


def save_bar(path: str, labels: Sequence[str], values, title: str, hline: float | None = None) -> None:
    fig, ax = plt.subplots(figsize=(max(6, 0.5 * len(labels)), 4))
    ax.bar(range(len(labels)), values)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    if hline is not None:
        ax.axhline(hline, color="red", lw=1, ls="--")
    ax.set_title(title)
    _finish(fig, path)


def save_error_grid(path: str, values, title: str, log: bool = True) -> None:
    """Bar chart of labeled error magnitudes on a log scale.

    ``values`` is a mapping of label -> nonnegative error; zeros are clamped
    to a floor so the log axis stays finite.
    """
    labels = list(values)
    errs = np.asarray([values[k] for k in labels], dtype=float)
    fig, ax = plt.subplots(figsize=(max(6, 0.5 * len(labels)), 4))
    if log:
        errs = np.maximum(errs, 1e-18)
        ax.set_yscale("log")
    ax.bar(range(len(labels)), errs)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_title(title)
    _finish(fig, path)

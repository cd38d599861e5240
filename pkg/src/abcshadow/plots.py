"""Figure rendering for the report path: sample paths, marginal densities,
envelope bands, box plots, and pattern displays. Everything draws on the Agg
backend and is saved to files; nothing opens a window.
"""

from __future__ import annotations

import math
import os
import tempfile

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .core import PointPattern  # noqa: E402
from .geometry import segment_endpoints  # noqa: E402
from .posterior import marginal_kde  # noqa: E402

__all__ = [
    "save_figure",
    "fig_trace",
    "fig_marginals",
    "fig_envelopes",
    "fig_boxplots",
    "fig_pattern",
]


def save_figure(fig, path: str, dpi: int = 130) -> None:
    """Save and close a figure, atomically."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-",
                               suffix=os.path.basename(path))
    os.close(fd)
    try:
        fig.savefig(tmp, dpi=dpi, format=os.path.splitext(path)[1].lstrip("."),
                    bbox_inches="tight")
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    finally:
        plt.close(fig)


def _grid_shape(k: int) -> tuple[int, int]:
    cols = 1 if k == 1 else 2
    rows = math.ceil(k / cols)
    return rows, cols


def fig_trace(samples, param_names, title: str | None = None):
    """Sample paths, one panel per parameter."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    k = samples.shape[1]
    fig, axes = plt.subplots(k, 1, figsize=(8, 2.2 * k), sharex=True,
                             squeeze=False)
    for j in range(k):
        ax = axes[j, 0]
        ax.plot(samples[:, j], lw=0.6, color="#1f5fa6")
        ax.set_ylabel(param_names[j])
    axes[-1, 0].set_xlabel("kept sample")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return fig


def fig_marginals(samples, param_names, truth=None, title: str | None = None):
    """Histogram with kernel density overlay, one panel per parameter."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    k = samples.shape[1]
    rows, cols = _grid_shape(k)
    fig, axes = plt.subplots(rows, cols, figsize=(4.5 * cols, 3.2 * rows),
                             squeeze=False)
    for j in range(rows * cols):
        ax = axes[j // cols, j % cols]
        if j >= k:
            ax.axis("off")
            continue
        x = samples[:, j]
        ax.hist(x, bins=40, density=True, color="#bcd4ea", edgecolor="white")
        if x.size >= 10 and np.std(x) > 0:
            kde = marginal_kde(x)
            ax.plot(kde.grid, kde.density, color="#1f5fa6", lw=1.5)
            ax.axvline(kde.mode, color="#a6371f", lw=1.0, ls="--")
        if truth is not None:
            ax.axvline(truth[j], color="#2e7d32", lw=1.0)
        ax.set_xlabel(param_names[j])
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return fig


def fig_envelopes(results: dict, title: str | None = None):
    """Observed curve inside its Monte Carlo envelope, one panel per statistic."""
    names = list(results)
    rows, cols = _grid_shape(len(names))
    fig, axes = plt.subplots(rows, cols, figsize=(4.8 * cols, 3.4 * rows),
                             squeeze=False)
    for idx in range(rows * cols):
        ax = axes[idx // cols, idx % cols]
        if idx >= len(names):
            ax.axis("off")
            continue
        res = results[names[idx]]
        ax.fill_between(res.u, res.lower, res.upper, color="#d9d9d9",
                        label="envelope")
        ax.plot(res.u, res.theoretical, color="#2e7d32", lw=1.0, ls="--",
                label="Poisson")
        ax.plot(res.u, res.observed, color="#1f5fa6", lw=1.5, label="observed")
        ax.set_xlabel("u")
        ax.set_ylabel(res.statistic)
        if idx == 0:
            ax.legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return fig


def fig_boxplots(samples, param_names, truth=None, title: str | None = None):
    """One box-and-whisker panel per parameter (whiskers at Q5/Q95)."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    k = samples.shape[1]
    fig, axes = plt.subplots(1, k, figsize=(2.2 * k, 3.6), squeeze=False)
    for j in range(k):
        ax = axes[0, j]
        ax.boxplot(samples[:, j], whis=(5, 95), showfliers=False)
        if truth is not None:
            ax.axhline(truth[j], color="#2e7d32", lw=1.0)
        ax.set_xticklabels([param_names[j]])
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return fig


def fig_pattern(pattern: PointPattern, segment_length: float | None = None,
                title: str | None = None):
    """Scatter of a pattern; marked patterns draw oriented segments."""
    window = pattern.window
    wx, wy = window.sides
    fig, ax = plt.subplots(figsize=(6.4, max(2.0, 6.4 * wy / wx)))
    if pattern.marks is not None and segment_length is not None and len(pattern):
        e0, e1 = segment_endpoints(pattern.points, pattern.marks, segment_length)
        for a, b in zip(e0, e1):
            ax.plot([a[0], b[0]], [a[1], b[1]], color="#1f5fa6", lw=1.2)
    elif len(pattern):
        ax.plot(pattern.points[:, 0], pattern.points[:, 1], "o",
                ms=3.5, color="#1f5fa6", mec="none")
    ax.set_xlim(window.lower[0], window.upper[0])
    ax.set_ylim(window.lower[1], window.upper[1])
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return fig

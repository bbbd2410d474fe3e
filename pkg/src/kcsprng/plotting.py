"""Figures written next to the text reports of ``stats`` and ``restart``."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .stats import ALPHA, autocorrelation  # noqa: E402


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_pvalues(reports, path):
    named = [r for r in reports if r.p_value is not None]
    labels = [r.name if r.name != "autocorrelation" else f"autocorr d={r.params['d']}"
              for r in named]
    values = [r.p_value for r in named]
    fig, ax = plt.subplots(figsize=(7, 0.45 * len(named) + 1.5))
    colors = ["tab:green" if r.passed else "tab:red" for r in named]
    ax.barh(labels, values, color=colors)
    ax.axvline(ALPHA, color="k", ls="--", lw=1, label=f"alpha = {ALPHA}")
    ax.set_xlim(0, 1)
    ax.set_xlabel("p-value")
    ax.invert_yaxis()
    ax.legend(loc="lower right", fontsize=8)
    return _save(fig, path)


def plot_autocorrelation(stream, path, max_lag: int = 64):
    lags = np.arange(1, max_lag + 1)
    z = [autocorrelation(stream, int(d)).statistic for d in lags]
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.stem(lags, z, basefmt=" ")
    for bound in (3.29, -3.29):
        ax.axhline(bound, color="tab:red", ls=":", lw=1)
    ax.set_xlabel("lag d")
    ax.set_ylabel("normal statistic")
    return _save(fig, path)


def plot_restart(report, path):
    runs = len(report.prefixes)
    shown = min(report.prefix_bits, 256)
    grid = np.array([[int(c) for c in p[:shown]] for p in report.prefixes])
    frac = np.array(report.distances, dtype=float) / report.prefix_bits
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 3.2),
                                   gridspec_kw={"width_ratios": [3, 1.2]})
    ax1.imshow(grid, aspect="auto", cmap="Greys", interpolation="nearest")
    ax1.set_yticks(range(runs), [f"run {i + 1}" for i in range(runs)])
    ax1.set_xlabel(f"output bit (first {shown})")
    im = ax2.imshow(frac, vmin=0, vmax=1, cmap="viridis")
    ax2.set_xticks(range(runs), range(1, runs + 1))
    ax2.set_yticks(range(runs), range(1, runs + 1))
    ax2.set_title("Hamming fraction", fontsize=9)
    fig.colorbar(im, ax=ax2, fraction=0.046)
    return _save(fig, path)

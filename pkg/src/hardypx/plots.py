"""PNG figures written next to the CSV reports (Agg backend, no display)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_verification", "plot_probe", "plot_density"]


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_verification(reports, path) -> None:
    """Left against right side per test function, with the line ``lhs = rhs``."""
    lhs = np.array([r.lhs for r in reports])
    rhs = np.array([r.rhs for r in reports])
    fig, ax = plt.subplots(figsize=(5, 4.5))
    ok = np.array([r.passed for r in reports])
    ax.scatter(rhs[ok], lhs[ok], s=18, label="pass")
    if np.any(~ok):
        ax.scatter(rhs[~ok], lhs[~ok], s=24, marker="x", color="red", label="fail")
    top = float(max(np.max(np.abs(lhs)), np.max(rhs), 1e-300))
    ax.plot([0, top], [0, top], color="gray", lw=1, ls="--", label="lhs = rhs")
    ax.set_xlabel("rhs (gradient + log term)")
    ax.set_ylabel("lhs")
    ax.legend(frameon=False)
    _save(fig, path)


def plot_probe(trace, path) -> None:
    """Ratio of every probe evaluation and the running maximum."""
    ratio = np.array([r.ratio for r in trace])
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(ratio, ".", ms=4, label="evaluation")
    ax.plot(np.maximum.accumulate(ratio), lw=1.5, label="best so far")
    ax.set_xlabel("evaluation")
    ax.set_ylabel("lhs / rhs")
    ax.legend(frameon=False)
    _save(fig, path)


def plot_density(X, w1, w2, path) -> None:
    """Both densities: curves in one dimension, coloured scatter otherwise."""
    n = X.shape[1]
    if n == 1:
        fig, ax = plt.subplots(figsize=(6, 3.5))
        order = np.argsort(X[:, 0])
        ax.plot(X[order, 0], w1[order], label="mu1")
        ax.plot(X[order, 0], w2[order], label="mu2")
        ax.set_xlabel("x")
        ax.legend(frameon=False)
    else:
        fig, axes = plt.subplots(1, 2, figsize=(9, 4))
        for ax, w, name in zip(axes, (w1, w2), ("mu1", "mu2")):
            sc = ax.scatter(X[:, 0], X[:, 1], c=w, s=8)
            fig.colorbar(sc, ax=ax)
            ax.set_title(name if n == 2 else f"{name} (x1, x2 projection)")
            ax.set_aspect("equal")
    _save(fig, path)

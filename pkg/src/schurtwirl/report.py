"""Figure rendering for the CLI report paths.

Each function writes one PNG next to the delimited output it illustrates.
Rendering is strictly file-based (Agg backend); nothing here is interactive.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_sizes_figure(rows, path) -> None:
    """Log-scale comparison of universal set sizes against design bounds and known designs."""
    labels = [f"({r.d},{r.t})" for r in rows]
    x = np.arange(len(rows))
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(x, [r.universal for r in rows], "o-", label="universal set")
    ax.plot(x, [r.bound for r in rows], "s--", label="design lower bound")
    known = [(i, r.known_unitary) for i, r in enumerate(rows) if r.known_unitary]
    if known:
        ax.plot(*zip(*known), "^", label="known design")
    ax.set_yscale("log")
    ax.set_xticks(x, labels)
    ax.set_xlabel("(d, t)")
    ax.set_ylabel("set size")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_twirl_figure(result, path) -> None:
    """Sector weights (when known) and output-state magnitude heatmap."""
    state = np.asarray(result.state)
    if result.sector_weights is not None:
        fig, (ax_w, ax_s) = plt.subplots(1, 2, figsize=(9, 4))
        ks = np.arange(1, len(result.sector_weights) + 1)
        ax_w.bar(ks, result.sector_weights)
        ax_w.set_xticks(ks)
        ax_w.set_xlabel("sector k")
        ax_w.set_ylabel("output weight")
        ax_w.set_title(f"total trace {result.total_trace:.6f}")
    else:
        fig, ax_s = plt.subplots(figsize=(5, 4))
    im = ax_s.imshow(np.abs(state), cmap="viridis")
    ax_s.set_title("|output state|")
    fig.colorbar(im, ax=ax_s, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_beta_figure(beta, path) -> None:
    """Raw and normalized sector weights of the Abelian integral."""
    ks = np.arange(1, len(beta.raw) + 1)
    width = 0.38
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(ks - width / 2, beta.raw, width, label="raw")
    ax.bar(ks + width / 2, beta.normalized, width, label="normalized")
    ax.set_xticks(ks)
    ax.set_xlabel("sector k")
    ax.set_ylabel("weight")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

"""Figure rendering for fit trajectories and lambda sweeps.

Figures are written next to the CSV outputs so a run's directory is
self-contained. Rendering is deterministic (Agg backend, fixed metadata).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_PNG_META = {"Software": "mvitcc"}


def save_trajectory_figure(trace, path) -> None:
    """Objective and view weights against the iteration counter."""
    iters = [e.iteration for e in trace]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.plot(iters, [e.objective for e in trace], marker="o", ms=3)
    ax1.set_xlabel("iteration")
    ax1.set_ylabel("objective J")
    ax1.grid(alpha=0.3)
    n_views = len(trace[0].weights)
    for i in range(n_views):
        ax2.plot(
            iters, [e.weights[i] for e in trace], marker="o", ms=3,
            label=f"view {i + 1}",
        )
    ax2.set_xlabel("iteration")
    ax2.set_ylabel("view weight")
    ax2.set_ylim(-0.05, 1.05)
    ax2.legend(fontsize=8)
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)


def save_sweep_figure(lambdas, weights, objectives, path, nmis=None) -> None:
    """Weights (and NMI, when labeled) across the lambda grid."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    n_views = len(weights[0])
    for i in range(n_views):
        ax1.plot(
            lambdas, [w[i] for w in weights], marker="o", ms=3,
            label=f"view {i + 1}",
        )
    ax1.set_xscale("log", base=2)
    ax1.set_xlabel("lambda")
    ax1.set_ylabel("view weight")
    ax1.set_ylim(-0.05, 1.05)
    ax1.legend(fontsize=8)
    ax1.grid(alpha=0.3)
    if nmis is not None:
        ax2.plot(lambdas, nmis, marker="s", ms=3, color="tab:green")
        ax2.set_ylabel("NMI")
    else:
        ax2.plot(lambdas, objectives, marker="s", ms=3, color="tab:red")
        ax2.set_ylabel("objective J")
    ax2.set_xscale("log", base=2)
    ax2.set_xlabel("lambda")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)

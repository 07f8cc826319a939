"""Planted block-structure multi-view co-occurrence generator.

Samples share one planted row partition; each view gets its own planted
column partition and a noise level. Counts are drawn from a single
multinomial per view, so per-view totals are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleConfigError
from .probability import ViewMatrix


@dataclass(frozen=True)
class SynthViewSpec:
    n_features: int
    feature_clusters: int
    noise: float
    total_count: int


@dataclass(frozen=True)
class SynthSpec:
    n_samples: int
    row_clusters: int
    views: tuple[SynthViewSpec, ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "views", tuple(self.views))
        if self.row_clusters < 1 or self.row_clusters > self.n_samples:
            raise InfeasibleConfigError(
                f"need 1 <= row_clusters <= n_samples, got "
                f"{self.row_clusters} for {self.n_samples} samples"
            )
        if not self.views:
            raise InfeasibleConfigError("at least one view is required")
        for i, v in enumerate(self.views):
            if v.feature_clusters < 1 or v.feature_clusters > v.n_features:
                raise InfeasibleConfigError(
                    f"view {i}: need 1 <= feature_clusters <= n_features"
                )
            if not 0.0 <= v.noise <= 1.0:
                raise InfeasibleConfigError(f"view {i}: noise must be in [0, 1]")
            if v.total_count < 1:
                raise InfeasibleConfigError(f"view {i}: total_count must be >= 1")


@dataclass(frozen=True)
class SynthDataset:
    views: tuple[ViewMatrix, ...]
    row_labels: np.ndarray
    col_labels: tuple[np.ndarray, ...]


def _cell_probabilities(
    row_labels: np.ndarray, col_labels: np.ndarray, k: int, l: int, noise: float
) -> np.ndarray:
    """Uniform-within-block cell distribution from the planted partitions.

    Block (a, b) carries mass (1-noise)*[b == a mod l]/k + noise/(k*l),
    spread uniformly over its member cells.
    """
    block = np.full((k, l), noise / (k * l))
    diag_cols = np.arange(k) % l
    block[np.arange(k), diag_cols] += (1.0 - noise) / k
    row_sizes = np.bincount(row_labels, minlength=k).astype(np.float64)
    col_sizes = np.bincount(col_labels, minlength=l).astype(np.float64)
    cells_per_block = np.outer(row_sizes, col_sizes)
    per_cell = np.where(cells_per_block > 0, block / np.maximum(cells_per_block, 1), 0.0)
    return per_cell[np.ix_(row_labels, col_labels)]


def generate(spec: SynthSpec) -> SynthDataset:
    """Draw a deterministic multi-view dataset from the planted model."""
    n, k = spec.n_samples, spec.row_clusters
    row_labels = np.arange(n, dtype=np.int64) % k
    views = []
    col_labels = []
    for vi, vs in enumerate(spec.views):
        m, l = vs.n_features, vs.feature_clusters
        cl = np.arange(m, dtype=np.int64) % l
        probs = _cell_probabilities(row_labels, cl, k, l, vs.noise)
        flat = probs.ravel()
        flat = flat / flat.sum()
        rng = np.random.default_rng([spec.seed, vi])
        counts = rng.multinomial(vs.total_count, flat).reshape(n, m)
        views.append(ViewMatrix.from_dense(counts))
        col_labels.append(cl)
    return SynthDataset(tuple(views), row_labels, tuple(col_labels))

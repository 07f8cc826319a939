"""External clustering evaluation: purity, NMI and Rand index.

NMI uses the geometric-mean normalization I / sqrt(H_pred * H_true);
the Rand index is the plain (unadjusted) variant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray  # (k_pred, k_true)
    n: int


@dataclass(frozen=True)
class MetricReport:
    purity: float
    nmi: float
    rand_index: float

    def as_dict(self) -> dict:
        return {
            "purity": self.purity,
            "nmi": self.nmi,
            "rand_index": self.rand_index,
        }


def _encode(labels) -> np.ndarray:
    labels = np.asarray(labels)
    _, enc = np.unique(labels, return_inverse=True)
    return enc


def contingency(pred, truth) -> ContingencyTable:
    """Co-occurrence counts between predicted clusters and true classes."""
    pred = _encode(pred)
    truth = _encode(truth)
    if len(pred) != len(truth):
        raise DimensionError("pred and truth must have equal length")
    if len(pred) == 0:
        raise DimensionError("labels must be non-empty")
    kp = int(pred.max()) + 1
    kt = int(truth.max()) + 1
    counts = np.zeros((kp, kt), dtype=np.int64)
    np.add.at(counts, (pred, truth), 1)
    return ContingencyTable(counts, len(pred))


def purity(t: ContingencyTable) -> float:
    """Fraction of items in the majority class of their cluster."""
    return float(t.counts.max(axis=1).sum() / t.n)


def _partition_entropy(sizes: np.ndarray, n: int) -> float:
    p = sizes[sizes > 0] / n
    return float(-np.sum(p * np.log(p)))


def _is_bijection(counts: np.ndarray) -> bool:
    return (
        counts.shape[0] == counts.shape[1]
        and np.all((counts > 0).sum(axis=0) == 1)
        and np.all((counts > 0).sum(axis=1) == 1)
    )


def nmi(t: ContingencyTable) -> float:
    """Normalized mutual information with sqrt normalization, in [0, 1]."""
    if _is_bijection(t.counts):
        return 1.0
    n = t.n
    hp = _partition_entropy(t.counts.sum(axis=1), n)
    ht = _partition_entropy(t.counts.sum(axis=0), n)
    if hp == 0 or ht == 0:
        return 0.0
    p = t.counts / n
    px = t.counts.sum(axis=1) / n
    py = t.counts.sum(axis=0) / n
    mask = p > 0
    mi = float(np.sum(p[mask] * np.log(p[mask] / np.outer(px, py)[mask])))
    return float(min(1.0, max(0.0, mi / np.sqrt(hp * ht))))


def rand_index(pred, truth) -> float:
    """Fraction of item pairs on which the two partitions agree."""
    t = contingency(pred, truth)
    n = t.n
    if n < 2:
        raise DomainError("Rand index needs at least 2 items")

    def c2(a):
        return a * (a - 1) / 2.0

    pairs = c2(float(n))
    same_same = float(np.sum(c2(t.counts.astype(np.float64))))
    sum_a = float(np.sum(c2(t.counts.sum(axis=1).astype(np.float64))))
    sum_b = float(np.sum(c2(t.counts.sum(axis=0).astype(np.float64))))
    return (pairs + 2 * same_same - sum_a - sum_b) / pairs


def evaluate(pred, truth) -> MetricReport:
    """All three metrics at once."""
    t = contingency(pred, truth)
    return MetricReport(
        purity=purity(t), nmi=nmi(t), rand_index=rand_index(pred, truth)
    )

"""Discrete probability machinery over sparse co-occurrence matrices.

All information quantities use the natural logarithm (nats), with the
conventions 0*ln(0) = 0 and p*ln(p/0) = +inf for p > 0. +inf is an
ordinary cost value, ordered above every finite cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import (
    DimensionError,
    DomainError,
    InvariantError,
    NormalizationError,
)

_SUM_TOL = 1e-9


def _as_1d(a, dtype=np.float64):
    arr = np.asarray(a, dtype=dtype)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-D array, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class ViewMatrix:
    """Raw sparse nonnegative co-occurrence counts for one view.

    Rows are samples (shared across views), columns are view-specific
    features. Stored in coordinate form; duplicate coordinates are invalid.
    """

    n_rows: int
    n_cols: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        vals = np.asarray(self.vals, dtype=np.float64)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "vals", vals)
        if not (len(rows) == len(cols) == len(vals)):
            raise DimensionError("rows, cols and vals must have equal length")
        if self.n_rows < 1 or self.n_cols < 1:
            raise DomainError("matrix dimensions must be positive")
        if len(rows) and (
            rows.min() < 0
            or rows.max() >= self.n_rows
            or cols.min() < 0
            or cols.max() >= self.n_cols
        ):
            raise DomainError("entry coordinates out of range")
        if np.any(vals < 0):
            raise DomainError("counts must be nonnegative")
        coords = rows * self.n_cols + cols
        if len(np.unique(coords)) != len(coords):
            raise DomainError("duplicate (row, col) coordinates")
        if vals.sum() <= 0:
            raise NormalizationError("matrix has no positive counts")

    @property
    def nnz(self) -> int:
        return len(self.vals)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n_rows, self.n_cols))
        dense[self.rows, self.cols] = self.vals
        return dense

    @classmethod
    def from_dense(cls, arr) -> "ViewMatrix":
        arr = np.asarray(arr, dtype=np.float64)
        rows, cols = np.nonzero(arr)
        return cls(arr.shape[0], arr.shape[1], rows, cols, arr[rows, cols])


@dataclass(frozen=True)
class ViewJoint:
    """Normalized empirical joint p(X, Y) with cached marginals.

    Stored cells are strictly positive; zeros are implicit. Marginals are
    exact row/column sums of the stored joint.
    """

    joint: sp.csr_matrix
    marginal_x: np.ndarray
    marginal_y: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.joint.shape[0]

    @property
    def n_cols(self) -> int:
        return self.joint.shape[1]

    @property
    def nnz(self) -> int:
        return self.joint.nnz

    @classmethod
    def from_csr(cls, joint: sp.csr_matrix) -> "ViewJoint":
        joint = sp.csr_matrix(joint, dtype=np.float64)
        joint.eliminate_zeros()
        joint.sort_indices()
        if joint.nnz and joint.data.min() < 0:
            raise DomainError("joint cells must be nonnegative")
        total = joint.data.sum()
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"joint sums to {total!r}, expected 1")
        mx = np.asarray(joint.sum(axis=1)).ravel()
        my = np.asarray(joint.sum(axis=0)).ravel()
        return cls(joint, mx, my)

    @classmethod
    def from_dense(cls, arr) -> "ViewJoint":
        return cls.from_csr(sp.csr_matrix(np.asarray(arr, dtype=np.float64)))

    def to_dense(self) -> np.ndarray:
        return self.joint.toarray()


@dataclass(frozen=True)
class RowAssignment:
    """Map from sample index to row-cluster index in [0, k)."""

    map: np.ndarray
    k: int

    def __post_init__(self):
        m = np.asarray(self.map, dtype=np.int64)
        object.__setattr__(self, "map", m)
        if self.k < 1:
            raise DomainError("cluster count must be >= 1")
        if len(m) and (m.min() < 0 or m.max() >= self.k):
            raise DomainError("cluster index out of range")


@dataclass(frozen=True)
class ColumnAssignment:
    """Map from feature index to column-cluster index in [0, l)."""

    map: np.ndarray
    l: int

    def __post_init__(self):
        m = np.asarray(self.map, dtype=np.int64)
        object.__setattr__(self, "map", m)
        if self.l < 1:
            raise DomainError("cluster count must be >= 1")
        if len(m) and (m.min() < 0 or m.max() >= self.l):
            raise DomainError("cluster index out of range")


@dataclass(frozen=True)
class CoclusterSummary:
    """Block masses and cluster marginals defining the approximate joint.

    block_mass[a, b] is the total probability of the (row-cluster a,
    column-cluster b) block. Together with the source joint's marginals
    this determines p_hat(x, y) = block * (p(x)/p(x_cluster)) *
    (p(y)/p(y_cluster)).
    """

    block_mass: np.ndarray
    row_cluster_mass: np.ndarray
    col_cluster_mass: np.ndarray
    marginal_x: np.ndarray
    marginal_y: np.ndarray
    row_map: np.ndarray
    col_map: np.ndarray

    @property
    def k(self) -> int:
        return self.block_mass.shape[0]

    @property
    def l(self) -> int:
        return self.block_mass.shape[1]


def normalize(m: ViewMatrix, alpha: float = 0.0) -> ViewJoint:
    """Turn a count matrix into an empirical joint distribution.

    With alpha > 0 the matrix is additively smoothed first, which adds
    alpha to every cell including implicit zeros and therefore densifies
    the joint; intended only for small matrices.
    """
    if alpha < 0:
        raise DomainError("alpha must be nonnegative")
    total = m.vals.sum()
    if alpha == 0:
        if total <= 0:
            raise NormalizationError("cannot normalize an all-zero matrix")
        joint = sp.csr_matrix(
            (m.vals / total, (m.rows, m.cols)), shape=(m.n_rows, m.n_cols)
        )
        return ViewJoint.from_csr(joint)
    dense = m.to_dense() + alpha
    return ViewJoint.from_dense(dense / dense.sum())


def kl_divergence(p, q) -> float:
    """KL divergence D(p || q) in nats between two discrete distributions."""
    p = _as_1d(p)
    q = _as_1d(q)
    if len(p) != len(q):
        raise DimensionError("distributions must have equal length")
    if np.any(p < 0) or np.any(q < 0):
        raise DomainError("distributions must be nonnegative")
    if abs(p.sum() - 1.0) > _SUM_TOL or abs(q.sum() - 1.0) > _SUM_TOL:
        raise DomainError("distributions must sum to 1")
    mask = p > 0
    if np.any(q[mask] == 0):
        return float("inf")
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def entropy(d) -> float:
    """Shannon entropy -sum d*ln(d) in nats."""
    d = _as_1d(d)
    if np.any(d < 0):
        raise DomainError("distribution entries must be nonnegative")
    if abs(d.sum() - 1.0) > _SUM_TOL:
        raise DomainError("distribution must sum to 1")
    pos = d[d > 0]
    return float(-np.sum(pos * np.log(pos)))


def mutual_information(j: ViewJoint) -> float:
    """Mutual information I(X; Y) of a joint, summed over stored cells."""
    coo = j.joint.tocoo()
    v = coo.data
    denom = j.marginal_x[coo.row] * j.marginal_y[coo.col]
    return float(np.sum(v * np.log(v / denom)))


def build_summary(
    j: ViewJoint, r: RowAssignment, c: ColumnAssignment
) -> CoclusterSummary:
    """Aggregate a joint into block masses under the given assignments."""
    if len(r.map) != j.n_rows or len(c.map) != j.n_cols:
        raise DimensionError("assignment lengths must match the joint's shape")
    coo = j.joint.tocoo()
    block = np.zeros((r.k, c.l))
    np.add.at(block, (r.map[coo.row], c.map[coo.col]), coo.data)
    row_mass = np.bincount(r.map, weights=j.marginal_x, minlength=r.k)
    col_mass = np.bincount(c.map, weights=j.marginal_y, minlength=c.l)
    return CoclusterSummary(
        block_mass=block,
        row_cluster_mass=row_mass,
        col_cluster_mass=col_mass,
        marginal_x=j.marginal_x,
        marginal_y=j.marginal_y,
        row_map=r.map,
        col_map=c.map,
    )


def approx_prob(s: CoclusterSummary, x: int, y: int) -> float:
    """The block-approximate joint p_hat(x, y) induced by the summary."""
    a = s.row_map[x]
    b = s.col_map[y]
    if s.row_cluster_mass[a] == 0 or s.col_cluster_mass[b] == 0:
        return 0.0
    return float(
        s.block_mass[a, b]
        * (s.marginal_x[x] / s.row_cluster_mass[a])
        * (s.marginal_y[y] / s.col_cluster_mass[b])
    )


def view_loss(j: ViewJoint, s: CoclusterSummary) -> float:
    """KL divergence D(p || p_hat) of a view under its co-cluster summary.

    Finite whenever the summary was built from this joint, because every
    block dominates the mass of its member cells.
    """
    coo = j.joint.tocoo()
    a = s.row_map[coo.row]
    b = s.col_map[coo.col]
    phat = (
        s.block_mass[a, b]
        * (j.marginal_x[coo.row] / np.where(s.row_cluster_mass[a] > 0, s.row_cluster_mass[a], 1.0))
        * (j.marginal_y[coo.col] / np.where(s.col_cluster_mass[b] > 0, s.col_cluster_mass[b], 1.0))
    )
    phat = np.where(
        (s.row_cluster_mass[a] > 0) & (s.col_cluster_mass[b] > 0), phat, 0.0
    )
    if np.any(phat == 0):
        return float("inf")
    return float(np.sum(coo.data * np.log(coo.data / phat)))


def row_candidate_cost(
    j: ViewJoint, s: CoclusterSummary, x: int, candidate: int
) -> float:
    """Cost p(x) * D(p(Y|x) || p_hat(Y | candidate row cluster)).

    Evaluated over the nonzero cells of row x only. May be +inf when the
    candidate's block profile has zero mass where p(y|x) > 0.
    """
    if not 0 <= candidate < s.k:
        raise IndexError(f"candidate row cluster {candidate} out of range")
    px = j.marginal_x[x]
    if px == 0:
        return 0.0
    start, stop = j.joint.indptr[x], j.joint.indptr[x + 1]
    ys = j.joint.indices[start:stop]
    v = j.joint.data[start:stop]
    if s.row_cluster_mass[candidate] == 0:
        return float("inf")
    b = s.col_map[ys]
    cmass = s.col_cluster_mass[b]
    blk = s.block_mass[candidate, b]
    if np.any(blk == 0) or np.any(cmass == 0):
        return float("inf")
    phat = (j.marginal_y[ys] / cmass) * (blk / s.row_cluster_mass[candidate])
    return float(np.sum(v * np.log((v / px) / phat)))


def col_candidate_cost(
    j: ViewJoint, s: CoclusterSummary, y: int, candidate: int
) -> float:
    """Cost p(y) * D(p(X|y) || p_hat(X | candidate column cluster))."""
    if not 0 <= candidate < s.l:
        raise IndexError(f"candidate column cluster {candidate} out of range")
    py = j.marginal_y[y]
    if py == 0:
        return 0.0
    csc = j.joint.tocsc()
    start, stop = csc.indptr[y], csc.indptr[y + 1]
    xs = csc.indices[start:stop]
    v = csc.data[start:stop]
    if s.col_cluster_mass[candidate] == 0:
        return float("inf")
    a = s.row_map[xs]
    rmass = s.row_cluster_mass[a]
    blk = s.block_mass[a, candidate]
    if np.any(blk == 0) or np.any(rmass == 0):
        return float("inf")
    phat = (j.marginal_x[xs] / rmass) * (blk / s.col_cluster_mass[candidate])
    return float(np.sum(v * np.log((v / py) / phat)))


def _log_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Elementwise ln(num/den) with zeros mapped to -inf; no warnings."""
    out = np.full(np.broadcast(num, den).shape, -np.inf)
    ok = (num > 0) & (den > 0)
    num_b, den_b = np.broadcast_arrays(num, den)
    out[ok] = np.log(num_b[ok] / den_b[ok])
    return out


def row_cost_matrix(j: ViewJoint, s: CoclusterSummary) -> np.ndarray:
    """All row candidate costs at once: an (n_rows, k) array.

    Equivalent to evaluating row_candidate_cost for every (x, candidate)
    pair; rows with p(x) = 0 cost 0 for every candidate.
    """
    coo = j.joint.tocoo()
    v = coo.data
    # per-cell part independent of the candidate cluster
    cell = v * (
        np.log(v)
        - np.log(j.marginal_x[coo.row])
        - np.log(j.marginal_y[coo.col] / s.col_cluster_mass[s.col_map[coo.col]])
    )
    const = np.zeros(j.n_rows)
    np.add.at(const, coo.row, cell)
    # mass of each row aggregated into column clusters: (n, l)
    bmass = np.zeros((j.n_rows, s.l))
    np.add.at(bmass, (coo.row, s.col_map[coo.col]), v)
    logb = _log_ratio(s.block_mass, s.row_cluster_mass[:, None])  # (k, l)
    finite_logb = np.where(np.isfinite(logb), logb, 0.0)
    cost = const[:, None] - bmass @ finite_logb.T
    infeasible = (bmass > 0) @ (~np.isfinite(logb)).T
    cost[infeasible] = np.inf
    return cost


def col_cost_matrix(j: ViewJoint, s: CoclusterSummary) -> np.ndarray:
    """All column candidate costs at once: an (n_cols, l) array."""
    coo = j.joint.tocoo()
    v = coo.data
    cell = v * (
        np.log(v)
        - np.log(j.marginal_y[coo.col])
        - np.log(j.marginal_x[coo.row] / s.row_cluster_mass[s.row_map[coo.row]])
    )
    const = np.zeros(j.n_cols)
    np.add.at(const, coo.col, cell)
    bmass = np.zeros((j.n_cols, s.k))
    np.add.at(bmass, (coo.col, s.row_map[coo.row]), v)
    logb = _log_ratio(s.block_mass.T, s.col_cluster_mass[:, None])  # (l, k)
    finite_logb = np.where(np.isfinite(logb), logb, 0.0)
    cost = const[:, None] - bmass @ finite_logb.T
    infeasible = (bmass > 0) @ (~np.isfinite(logb)).T
    cost[infeasible] = np.inf
    return cost


def check_summary(j: ViewJoint, s: CoclusterSummary) -> None:
    """Assert the summary invariants; raises InvariantError on violation."""
    if abs(s.block_mass.sum() - 1.0) > 1e-12:
        raise InvariantError("block masses do not sum to 1")
    if np.max(np.abs(s.block_mass.sum(axis=1) - s.row_cluster_mass)) > 1e-12:
        raise InvariantError("row cluster masses inconsistent with blocks")
    if np.max(np.abs(s.block_mass.sum(axis=0) - s.col_cluster_mass)) > 1e-12:
        raise InvariantError("column cluster masses inconsistent with blocks")

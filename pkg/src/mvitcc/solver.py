"""Block-coordinate descent for multi-view information-theoretic co-clustering.

One iteration runs, in order: a weighted row step over the shared sample
partition, an independent column step per view, a recomputation of the
per-view losses, and the closed-form maximum-entropy weight update.
Summaries are rebuilt after the row step and again after the column step
so that every step is an exact blockwise minimizer; the objective is
therefore non-increasing.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InfeasibleConfigError, InvariantError
from .probability import (
    ColumnAssignment,
    RowAssignment,
    ViewJoint,
    build_summary,
    col_cost_matrix,
    row_cost_matrix,
    view_loss,
)

_LAMBDA_HARD_MIN = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    k: int
    l: tuple[int, ...]
    lam: float = 1.0
    epsilon: float = 1e-6
    max_iter: int = 20
    seed: int = 0
    restarts: int = 1
    alpha: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "l", tuple(int(v) for v in self.l))
        if self.k < 1:
            raise DomainError("k must be >= 1")
        if any(li < 1 for li in self.l):
            raise DomainError("every feature-cluster count must be >= 1")
        if self.lam <= 0:
            raise DomainError("lambda must be positive")
        if self.epsilon < 0:
            raise DomainError("epsilon must be nonnegative")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")
        if self.restarts < 1:
            raise DomainError("restarts must be >= 1")
        if self.alpha < 0:
            raise DomainError("alpha must be nonnegative")


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    objective: float
    weighted_loss: float
    weights: tuple[float, ...]


@dataclass(frozen=True)
class StepRecord:
    """What a row/column step saw and did, for independent verification.

    Assignments and summaries are frozen at their pre-step values; costs
    are the candidate-cost matrices evaluated against those summaries.
    repaired holds indices moved afterwards by empty-cluster repair.
    """

    prev_row_map: np.ndarray
    prev_col_maps: tuple[np.ndarray, ...]
    weights: np.ndarray
    costs: np.ndarray
    repaired: tuple[int, ...]


@dataclass
class SolverState:
    row_assignment: RowAssignment
    col_assignments: list[ColumnAssignment]
    summaries: list
    weights: np.ndarray
    q: np.ndarray
    trace: list[TraceEntry] = field(default_factory=list)
    last_row_step: StepRecord | None = None
    last_col_steps: tuple[StepRecord, ...] | None = None

    @property
    def n_views(self) -> int:
        return len(self.col_assignments)


@dataclass(frozen=True)
class FitResult:
    state: SolverState
    iterations_used: int
    converged: bool
    restart_index: int
    best_restart_seed: int
    objective: float
    metrics: dict | None = None


def _init_assignment(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    if n < k:
        raise InfeasibleConfigError(f"cannot split {n} items into {k} clusters")
    out = np.empty(n, dtype=np.int64)
    out[:k] = np.arange(k)
    if n > k:
        out[k:] = rng.integers(0, k, size=n - k)
    return out


def _rebuild(state: SolverState, views: list[ViewJoint]) -> None:
    state.summaries = [
        build_summary(j, state.row_assignment, c)
        for j, c in zip(views, state.col_assignments)
    ]


def initialize(
    config: SolverConfig, views: list[ViewJoint], restart_index: int = 0
) -> SolverState:
    """Deterministic initial state for one restart.

    The first k samples seed clusters 0..k-1; the rest are drawn uniformly
    from a generator seeded with (seed + restart_index). Column assignments
    follow the same rule per view. Weights start uniform.
    """
    n_views = len(views)
    if n_views == 0:
        raise InfeasibleConfigError("at least one view is required")
    if len(config.l) != n_views:
        raise InfeasibleConfigError(
            f"config lists {len(config.l)} feature-cluster counts "
            f"for {n_views} views"
        )
    n = views[0].n_rows
    if any(j.n_rows != n for j in views):
        raise InfeasibleConfigError("views disagree on the number of samples")
    rng = np.random.default_rng(config.seed + restart_index)
    row = RowAssignment(_init_assignment(n, config.k, rng), config.k)
    cols = [
        ColumnAssignment(_init_assignment(j.n_cols, li, rng), li)
        for j, li in zip(views, config.l)
    ]
    weights = np.full(n_views, 1.0 / n_views)
    state = SolverState(row, cols, [], weights, np.zeros(n_views))
    _rebuild(state, views)
    state.q = np.array(
        [view_loss(j, s) for j, s in zip(views, state.summaries)]
    )
    state.trace.append(
        TraceEntry(0, objective(state, config.lam), float(weights @ state.q),
                   tuple(weights))
    )
    return state


def state_from_assignments(
    config: SolverConfig,
    views: list[ViewJoint],
    row_map,
    col_maps,
) -> SolverState:
    """Build a consistent state from explicit assignments (test/oracle use)."""
    row = RowAssignment(np.asarray(row_map, dtype=np.int64), config.k)
    cols = [
        ColumnAssignment(np.asarray(m, dtype=np.int64), li)
        for m, li in zip(col_maps, config.l)
    ]
    n_views = len(views)
    weights = np.full(n_views, 1.0 / n_views)
    state = SolverState(row, cols, [], weights, np.zeros(n_views))
    _rebuild(state, views)
    state.q = np.array(
        [view_loss(j, s) for j, s in zip(views, state.summaries)]
    )
    state.trace.append(
        TraceEntry(0, objective(state, config.lam), float(weights @ state.q),
                   tuple(weights))
    )
    return state


def _argmin_with_ties(costs: np.ndarray, current: np.ndarray) -> np.ndarray:
    """Per-row argmin where the current cluster wins ties (incl. all-inf)."""
    best = costs.min(axis=1)
    keep = costs[np.arange(len(current)), current] <= best
    return np.where(keep, current, np.argmin(costs, axis=1))


def _repair_empty(
    assign: np.ndarray, costs: np.ndarray, n_clusters: int
) -> list[int]:
    """Move worst-fitting items into empty clusters; returns moved indices.

    Empty clusters are filled in increasing index order; the donor item is
    the one with the largest cost at its freshly assigned cluster, drawn
    only from clusters that still have >= 2 members (ties: smallest index).
    """
    moved: list[int] = []
    sizes = np.bincount(assign, minlength=n_clusters)
    own_cost = costs[np.arange(len(assign)), assign]
    for empty in range(n_clusters):
        if sizes[empty] > 0:
            continue
        donor_ok = sizes[assign] >= 2
        if not donor_ok.any():
            raise InvariantError("no donor cluster available for repair")
        cand_cost = np.where(donor_ok, own_cost, -np.inf)
        # np.argmax picks the smallest index among exact ties
        item = int(np.argmax(cand_cost))
        sizes[assign[item]] -= 1
        assign[item] = empty
        sizes[empty] += 1
        moved.append(item)
    return moved


def row_step(
    state: SolverState, views: list[ViewJoint], threads: int = 1
) -> SolverState:
    """Reassign every sample to the weighted-cost argmin cluster."""
    k = state.row_assignment.k
    n = len(state.row_assignment.map)
    total = np.zeros((n, k))
    active = [i for i in range(state.n_views) if state.weights[i] > 0]

    def one_view(i):
        return row_cost_matrix(views[i], state.summaries[i])

    if threads > 1 and len(active) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            mats = list(ex.map(one_view, active))
    else:
        mats = [one_view(i) for i in active]
    for i, mat in zip(active, mats):
        total += state.weights[i] * mat

    current = state.row_assignment.map
    new = _argmin_with_ties(total, current).astype(np.int64)
    moved = _repair_empty(new, total, k)
    record = StepRecord(
        prev_row_map=current.copy(),
        prev_col_maps=tuple(c.map.copy() for c in state.col_assignments),
        weights=state.weights.copy(),
        costs=total,
        repaired=tuple(moved),
    )
    state.row_assignment = RowAssignment(new, k)
    _rebuild(state, views)
    state.last_row_step = record
    return state


def column_step(
    state: SolverState, views: list[ViewJoint], threads: int = 1
) -> SolverState:
    """Reassign every feature of every view to its cost-argmin cluster."""
    records = []

    def one_view(i):
        return col_cost_matrix(views[i], state.summaries[i])

    idx = list(range(state.n_views))
    if threads > 1 and len(idx) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            mats = list(ex.map(one_view, idx))
    else:
        mats = [one_view(i) for i in idx]

    prev_row = state.row_assignment.map.copy()
    prev_cols = tuple(c.map.copy() for c in state.col_assignments)
    for i, costs in zip(idx, mats):
        li = state.col_assignments[i].l
        current = state.col_assignments[i].map
        new = _argmin_with_ties(costs, current).astype(np.int64)
        moved = _repair_empty(new, costs, li)
        records.append(
            StepRecord(
                prev_row_map=prev_row,
                prev_col_maps=prev_cols,
                weights=state.weights.copy(),
                costs=costs,
                repaired=tuple(moved),
            )
        )
        state.col_assignments[i] = ColumnAssignment(new, li)
    _rebuild(state, views)
    state.last_col_steps = tuple(records)
    return state


def weight_step(q, lam: float) -> np.ndarray:
    """Closed-form maximum-entropy weights w_i ~ exp(-q_i / lambda).

    Computed with a min-shift on q for numerical stability. For lambda
    below 1e-12 the limit is returned instead: all weight on the argmin
    of q, split equally among exact ties.
    """
    q = np.asarray(q, dtype=np.float64)
    if lam <= 0:
        raise DomainError("lambda must be positive")
    if not np.all(np.isfinite(q)):
        raise InvariantError("view losses must be finite for the weight step")
    if lam < _LAMBDA_HARD_MIN:
        mask = q == q.min()
        return mask / mask.sum()
    z = np.exp(-(q - q.min()) / lam)
    return z / z.sum()


def objective(state: SolverState, lam: float) -> float:
    """J = sum_i w_i Q_i + lambda * sum_i w_i ln w_i (may be negative)."""
    w = state.weights
    pos = w > 0
    ent_term = float(np.sum(w[pos] * np.log(w[pos])))
    return float(w @ state.q) + lam * ent_term


def iterate_once(
    state: SolverState,
    views: list[ViewJoint],
    config: SolverConfig,
    threads: int = 1,
) -> SolverState:
    """One full iteration: rows, columns, losses, weights, trace append."""
    state = row_step(state, views, threads)
    state = column_step(state, views, threads)
    state.q = np.array(
        [view_loss(j, s) for j, s in zip(views, state.summaries)]
    )
    state.weights = weight_step(state.q, config.lam)
    it = state.trace[-1].iteration + 1 if state.trace else 1
    state.trace.append(
        TraceEntry(
            it,
            objective(state, config.lam),
            float(state.weights @ state.q),
            tuple(state.weights),
        )
    )
    return state


def _run_single(
    config: SolverConfig,
    views: list[ViewJoint],
    restart_index: int,
    threads: int,
) -> tuple[SolverState, int, bool]:
    state = initialize(config, views, restart_index)
    prev_j = state.trace[-1].objective
    converged = False
    iters = 0
    for _ in range(config.max_iter):
        state = iterate_once(state, views, config, threads)
        iters += 1
        cur_j = state.trace[-1].objective
        if abs(prev_j - cur_j) <= config.epsilon * max(1.0, abs(prev_j)):
            converged = True
            break
        prev_j = cur_j
    return state, iters, converged


def fit(
    config: SolverConfig,
    views: list[ViewJoint],
    labels=None,
    threads: int = 1,
) -> FitResult:
    """Run all restarts and return the one with the smallest final J.

    Ties between restarts go to the smallest restart index. If labels are
    given, a purity/NMI/Rand-index report is attached.
    """
    best = None
    for r in range(config.restarts):
        state, iters, converged = _run_single(config, views, r, threads)
        final_j = state.trace[-1].objective
        if best is None or final_j < best[0]:
            best = (final_j, r, state, iters, converged)
    final_j, r, state, iters, converged = best
    metrics = None
    if labels is not None:
        from .metrics import evaluate

        metrics = evaluate(state.row_assignment.map, labels)
    return FitResult(
        state=state,
        iterations_used=iters,
        converged=converged,
        restart_index=r,
        best_restart_seed=config.seed + r,
        objective=final_j,
        metrics=metrics,
    )

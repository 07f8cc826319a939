"""Brute-force verification backend for tiny instances.

Exhaustively minimizes the weighted co-clustering objective over all
row/column assignments, and re-derives per-item argmins to audit solver
steps. Intended for test support and debugging only.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SearchSpaceError
from .probability import (
    ColumnAssignment,
    RowAssignment,
    ViewJoint,
    build_summary,
    col_candidate_cost,
    row_candidate_cost,
    view_loss,
)
from .solver import SolverState, StepRecord, weight_step

SIZE_CAP = 10_000_000


@dataclass(frozen=True)
class OracleResult:
    global_min_objective: float
    row_map: tuple[int, ...]
    col_maps: tuple[tuple[int, ...], ...]
    weights: tuple[float, ...]
    n_optima_up_to_relabeling: int


@dataclass(frozen=True)
class BlockwiseVerdict:
    passed: bool
    message: str = ""


def _canonical(assignment) -> tuple[int, ...]:
    """Relabel clusters in order of first appearance."""
    mapping = {}
    out = []
    for a in assignment:
        if a not in mapping:
            mapping[a] = len(mapping)
        out.append(mapping[a])
    return tuple(out)


def exhaustive_min(
    views: list[ViewJoint], k: int, l, lam: float
) -> OracleResult:
    """Enumerate every assignment and return the global objective minimum.

    Weights come from the closed form for each candidate assignment. The
    lexicographically smallest minimizer wins ties; the optimum count is
    taken up to cluster relabeling (within 1e-12 of the minimum).
    """
    l = tuple(int(v) for v in l)
    n = views[0].n_rows
    ms = [j.n_cols for j in views]
    size = (k ** n) * math.prod(li ** mi for li, mi in zip(l, ms))
    if size > SIZE_CAP:
        raise SearchSpaceError(
            f"search space of {size} configurations exceeds cap {SIZE_CAP}"
        )

    tol = 1e-12
    best = None
    near_optima: list[tuple[float, tuple, tuple]] = []
    col_spaces = [
        list(itertools.product(range(li), repeat=mi)) for li, mi in zip(l, ms)
    ]
    for rows in itertools.product(range(k), repeat=n):
        r = RowAssignment(np.asarray(rows, dtype=np.int64), k)
        for cols in itertools.product(*col_spaces):
            q = np.empty(len(views))
            for i, (j, cm) in enumerate(zip(views, cols)):
                c = ColumnAssignment(np.asarray(cm, dtype=np.int64), l[i])
                q[i] = view_loss(j, build_summary(j, r, c))
            w = weight_step(q, lam)
            pos = w > 0
            jval = float(w @ q) + lam * float(np.sum(w[pos] * np.log(w[pos])))
            if best is None or jval < best[0]:
                best = (jval, rows, cols, tuple(w))
                near_optima = [t for t in near_optima if t[0] <= jval + tol]
            if jval <= best[0] + tol:
                near_optima.append(
                    (jval, _canonical(rows), tuple(_canonical(c) for c in cols))
                )
    min_j = best[0]
    count = len({(rc, cc) for jv, rc, cc in near_optima if jv <= min_j + tol})
    return OracleResult(
        global_min_objective=min_j,
        row_map=best[1],
        col_maps=best[2],
        weights=best[3],
        n_optima_up_to_relabeling=count,
    )


def _tie_argmin(costs, current) -> int:
    best = min(costs)
    if costs[current] <= best:
        return current
    return int(np.argmin(costs))


def check_blockwise(
    state: SolverState, views: list[ViewJoint], which: str = "both"
) -> BlockwiseVerdict:
    """Audit the most recent row/column step of a solver state.

    Re-derives every per-item argmin from scratch: summaries rebuilt from
    the recorded pre-step assignments, costs via the scalar candidate-cost
    functions, current-cluster-wins tie rule. Items moved by empty-cluster
    repair are exempt. Reports the first discrepancy found.
    """
    if which in ("row", "both"):
        rec = state.last_row_step
        if rec is None:
            return BlockwiseVerdict(False, "no recorded row step")
        verdict = _check_rows(state, views, rec)
        if not verdict.passed:
            return verdict
    if which in ("col", "both"):
        recs = state.last_col_steps
        if recs is None:
            return BlockwiseVerdict(False, "no recorded column step")
        for vi, rec in enumerate(recs):
            verdict = _check_cols(state, views, vi, rec)
            if not verdict.passed:
                return verdict
    return BlockwiseVerdict(True)


def _check_rows(state, views, rec: StepRecord) -> BlockwiseVerdict:
    k = state.row_assignment.k
    prev_r = RowAssignment(rec.prev_row_map, k)
    summaries = [
        build_summary(
            j, prev_r, ColumnAssignment(cm, state.col_assignments[i].l)
        )
        for i, (j, cm) in enumerate(zip(views, rec.prev_col_maps))
    ]
    repaired = set(rec.repaired)
    for x in range(len(rec.prev_row_map)):
        if x in repaired:
            continue
        costs = [
            sum(
                rec.weights[i] * row_candidate_cost(views[i], summaries[i], x, c)
                for i in range(len(views))
                if rec.weights[i] > 0
            )
            for c in range(k)
        ]
        expected = _tie_argmin(costs, int(rec.prev_row_map[x]))
        got = int(state.row_assignment.map[x])
        if got != expected and costs[got] != costs[expected]:
            return BlockwiseVerdict(
                False,
                f"sample {x}: assigned cluster {got}, argmin is {expected}",
            )
    return BlockwiseVerdict(True)


def _check_cols(state, views, vi: int, rec: StepRecord) -> BlockwiseVerdict:
    li = state.col_assignments[vi].l
    prev_c = ColumnAssignment(rec.prev_col_maps[vi], li)
    prev_r = RowAssignment(rec.prev_row_map, state.row_assignment.k)
    summary = build_summary(views[vi], prev_r, prev_c)
    repaired = set(rec.repaired)
    for y in range(views[vi].n_cols):
        if y in repaired:
            continue
        costs = [
            col_candidate_cost(views[vi], summary, y, c) for c in range(li)
        ]
        expected = _tie_argmin(costs, int(rec.prev_col_maps[vi][y]))
        got = int(state.col_assignments[vi].map[y])
        if got != expected and costs[got] != costs[expected]:
            return BlockwiseVerdict(
                False,
                f"view {vi} feature {y}: assigned cluster {got}, "
                f"argmin is {expected}",
            )
    return BlockwiseVerdict(True)

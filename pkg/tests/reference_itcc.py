"""Independent single-view co-clustering reference.

A deliberately plain reimplementation of the single-view descent loop,
built on the scalar candidate-cost functions only. Used to verify that
the multi-view solver with one view follows the identical trajectory.
"""

import numpy as np

from mvitcc.probability import (
    ColumnAssignment,
    RowAssignment,
    build_summary,
    col_candidate_cost,
    row_candidate_cost,
    view_loss,
)


def _tie_argmin(costs, current):
    best = min(costs)
    if costs[current] <= best:
        return current
    return int(np.argmin(costs))


def _repair(assign, cost_of, n_clusters):
    sizes = np.bincount(assign, minlength=n_clusters)
    for empty in range(n_clusters):
        if sizes[empty] > 0:
            continue
        best_item, best_cost = None, -np.inf
        for item, a in enumerate(assign):
            if sizes[a] >= 2 and cost_of[item] > best_cost:
                best_item, best_cost = item, cost_of[item]
        sizes[assign[best_item]] -= 1
        assign[best_item] = empty
        sizes[empty] += 1


def itcc_trajectory(joint, k, l, seed, max_iter=20, epsilon=1e-6):
    """Run plain single-view co-clustering; returns per-iteration snapshots.

    Initialization matches the solver contract: first k samples (first l
    features) seed the clusters in order, the rest drawn uniformly from a
    generator seeded with `seed`, rows before columns.
    """
    n, m = joint.n_rows, joint.n_cols
    rng = np.random.default_rng(seed)
    row = np.empty(n, dtype=np.int64)
    row[:k] = np.arange(k)
    if n > k:
        row[k:] = rng.integers(0, k, size=n - k)
    col = np.empty(m, dtype=np.int64)
    col[:l] = np.arange(l)
    if m > l:
        col[l:] = rng.integers(0, l, size=m - l)

    def summary():
        return build_summary(
            joint, RowAssignment(row, k), ColumnAssignment(col, l)
        )

    snapshots = [(row.copy(), col.copy(), view_loss(joint, summary()))]
    prev_j = snapshots[0][2]
    for _ in range(max_iter):
        s = summary()
        costs = np.array(
            [[row_candidate_cost(joint, s, x, c) for c in range(k)]
             for x in range(n)]
        )
        new_row = np.array(
            [_tie_argmin(costs[x], row[x]) for x in range(n)], dtype=np.int64
        )
        _repair(new_row, costs[np.arange(n), new_row], k)
        row = new_row

        s = summary()
        ccosts = np.array(
            [[col_candidate_cost(joint, s, y, c) for c in range(l)]
             for y in range(m)]
        )
        new_col = np.array(
            [_tie_argmin(ccosts[y], col[y]) for y in range(m)], dtype=np.int64
        )
        _repair(new_col, ccosts[np.arange(m), new_col], l)
        col = new_col

        j = view_loss(joint, summary())
        snapshots.append((row.copy(), col.copy(), j))
        if abs(prev_j - j) <= epsilon * max(1.0, abs(prev_j)):
            break
        prev_j = j
    return snapshots

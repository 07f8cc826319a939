"""File formats: sparse view matrices, label files, dataset manifests and
fit-result serialization.

View matrix format (coordinate text, MatrixMarket style):
  - lines starting with "%" are comments and ignored
  - first non-comment line: "n_rows n_cols nnz"
  - then nnz lines "row col value" with 1-based indices and real
    nonnegative values

Label file format: one nonnegative integer per line, in sample order.

Manifest format: a single JSON object
  {
    "name": optional string,
    "n_samples": optional int,
    "views": [{"matrix_path": str, "feature_cluster_count": optional int}],
    "labels_path": optional str
  }
Relative paths resolve against the manifest's directory.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConsistencyError,
    DomainError,
    FormatError,
    LengthError,
    ParseError,
)
from .probability import ViewMatrix


@dataclass(frozen=True)
class ManifestView:
    matrix_path: str
    feature_cluster_count: int | None = None


@dataclass(frozen=True)
class DatasetManifest:
    n_samples: int
    views: tuple[ManifestView, ...]
    labels_path: str | None = None
    name: str | None = None


def _fmt(v: float) -> str:
    """Locale-free float formatting with 17 significant digits."""
    return format(float(v), ".17g")


def read_view_matrix(path) -> ViewMatrix:
    """Parse a sparse coordinate-format count matrix."""
    header = None
    rows, cols, vals = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            parts = line.split()
            if header is None:
                if len(parts) != 3:
                    raise ParseError("header must be 'n_rows n_cols nnz'", lineno)
                try:
                    header = tuple(int(p) for p in parts)
                except ValueError:
                    raise ParseError("non-integer header field", lineno) from None
                continue
            if len(parts) != 3:
                raise ParseError("entry must be 'row col value'", lineno)
            try:
                r, c = int(parts[0]), int(parts[1])
                v = float(parts[2])
            except ValueError:
                raise ParseError("malformed entry", lineno) from None
            if v < 0:
                raise DomainError(f"line {lineno}: negative count {v}")
            rows.append(r - 1)
            cols.append(c - 1)
            vals.append(v)
    if header is None:
        raise FormatError(f"{path}: empty matrix file")
    n_rows, n_cols, nnz = header
    if len(vals) != nnz:
        raise ParseError(f"{path}: header promises {nnz} entries, found {len(vals)}")
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    coords = rows * max(n_cols, 1) + cols
    if len(np.unique(coords)) != len(coords):
        raise FormatError(f"{path}: duplicate (row, col) coordinate")
    return ViewMatrix(n_rows, n_cols, rows, cols, np.asarray(vals))


def write_view_matrix(m: ViewMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{m.n_rows} {m.n_cols} {m.nnz}\n")
        for r, c, v in zip(m.rows, m.cols, m.vals):
            fh.write(f"{r + 1} {c + 1} {_fmt(v)}\n")


def read_labels(path, n: int | None = None) -> np.ndarray:
    """Read one nonnegative integer label per line."""
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError:
                raise ParseError(f"non-integer label {line!r}", lineno) from None
    if n is not None and len(labels) != n:
        raise LengthError(f"{path}: expected {n} labels, found {len(labels)}")
    return np.asarray(labels, dtype=np.int64)


def write_labels(labels, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v in labels:
            fh.write(f"{int(v)}\n")


def read_manifest(path) -> tuple[DatasetManifest, list[ViewMatrix]]:
    """Load a manifest and every view matrix it references."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict) or "views" not in doc:
        raise FormatError(f"{path}: manifest must be an object with 'views'")
    raw_views = doc["views"]
    if not isinstance(raw_views, list) or len(raw_views) == 0:
        raise FormatError(f"{path}: manifest must list at least one view")
    base = os.path.dirname(os.path.abspath(path))

    def resolve(p):
        return p if os.path.isabs(p) else os.path.join(base, p)

    views = []
    matrices = []
    for i, rv in enumerate(raw_views):
        if not isinstance(rv, dict) or "matrix_path" not in rv:
            raise FormatError(f"{path}: view {i} lacks 'matrix_path'")
        mv = ManifestView(rv["matrix_path"], rv.get("feature_cluster_count"))
        views.append(mv)
        matrices.append(read_view_matrix(resolve(mv.matrix_path)))
    n = doc.get("n_samples", matrices[0].n_rows)
    for i, m in enumerate(matrices):
        if m.n_rows != n:
            raise ConsistencyError(
                f"view {i} ({views[i].matrix_path}) has {m.n_rows} rows, "
                f"expected {n}"
            )
    manifest = DatasetManifest(
        n_samples=n,
        views=tuple(views),
        labels_path=doc.get("labels_path"),
        name=doc.get("name"),
    )
    return manifest, matrices


def load_manifest_labels(path, manifest: DatasetManifest) -> np.ndarray | None:
    if manifest.labels_path is None:
        return None
    base = os.path.dirname(os.path.abspath(path))
    lp = manifest.labels_path
    if not os.path.isabs(lp):
        lp = os.path.join(base, lp)
    return read_labels(lp, manifest.n_samples)


def write_manifest(manifest: DatasetManifest, path) -> None:
    doc = {
        "name": manifest.name,
        "n_samples": manifest.n_samples,
        "views": [
            {
                "matrix_path": v.matrix_path,
                "feature_cluster_count": v.feature_cluster_count,
            }
            for v in manifest.views
        ],
        "labels_path": manifest.labels_path,
    }
    doc = {k: v for k, v in doc.items() if v is not None}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_fit_result(result, out_dir, config=None) -> list[str]:
    """Serialize a FitResult: assignments, weights, trajectory and report.

    Returns the list of files written (relative to out_dir).
    """
    os.makedirs(out_dir, exist_ok=True)
    state = result.state
    written = []

    def openw(name):
        written.append(name)
        return open(os.path.join(out_dir, name), "w", encoding="utf-8",
                    newline="\n")

    with openw("row_assignments.csv") as fh:
        fh.write("sample_index,cluster\n")
        for i, c in enumerate(state.row_assignment.map):
            fh.write(f"{i},{int(c)}\n")

    for vi, ca in enumerate(state.col_assignments):
        with openw(f"col_assignments_{vi}.csv") as fh:
            fh.write("feature_index,cluster\n")
            for i, c in enumerate(ca.map):
                fh.write(f"{i},{int(c)}\n")

    with openw("weights.csv") as fh:
        fh.write("view_index,weight\n")
        for i, w in enumerate(state.weights):
            fh.write(f"{i},{_fmt(w)}\n")

    n_views = state.n_views
    with openw("trajectory.csv") as fh:
        cols = ",".join(f"w_{i + 1}" for i in range(n_views))
        fh.write(f"iteration,J,weighted_loss,{cols}\n")
        for entry in state.trace:
            ws = ",".join(_fmt(w) for w in entry.weights)
            fh.write(
                f"{entry.iteration},{_fmt(entry.objective)},"
                f"{_fmt(entry.weighted_loss)},{ws}\n"
            )

    report = {
        "final_objective": result.objective,
        "iterations": result.iterations_used,
        "converged": result.converged,
        "restart_index": result.restart_index,
        "best_restart_seed": result.best_restart_seed,
    }
    if config is not None:
        report["config"] = config
    if result.metrics is not None:
        report.update(result.metrics.as_dict())
    with openw("report.json") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return written

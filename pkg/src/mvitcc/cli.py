"""Command-line front end.

Subcommands: fit, eval, gen, sweep and the hidden debugging subcommand
oracle. All randomness is controlled by --seed; repeated invocations with
identical flags produce byte-identical outputs, independent of --threads.

Exit codes: 0 success, 1 usage error, 2 data error, 3 infeasible
configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import dataio, plots
from .errors import (
    DATA_ERRORS,
    InfeasibleConfigError,
    LengthError,
    SearchSpaceError,
)
from .metrics import evaluate
from .oracle import exhaustive_min
from .probability import normalize
from .solver import SolverConfig, fit
from .synth import SynthSpec, SynthViewSpec, generate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INFEASIBLE = 3

DEFAULT_FEATURE_CLUSTERS = 20
DEFAULT_LAMBDA_GRID = [2.0 ** e for e in range(-6, 7)]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fit_flags(p, require_out=True):
    p.add_argument("--manifest", required=True, help="dataset manifest JSON")
    p.add_argument("--k", type=int, required=True, help="row-cluster count")
    p.add_argument(
        "--l",
        type=str,
        default=None,
        help="comma-separated per-view feature-cluster counts "
        "(overrides the manifest; default %d per view)" % DEFAULT_FEATURE_CLUSTERS,
    )
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", required=require_out, help="output directory")


def _build_parser() -> _Parser:
    parser = _Parser(prog="mvitcc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a co-clustering model")
    _fit_flags(p_fit)

    p_eval = sub.add_parser("eval", help="score predictions against labels")
    p_eval.add_argument("--pred", required=True, help="predicted labels file")
    p_eval.add_argument("--labels", required=True, help="true labels file")
    p_eval.add_argument("--out", default=None, help="optional metrics JSON path")

    p_gen = sub.add_parser("gen", help="generate a planted synthetic dataset")
    p_gen.add_argument("--samples", type=int, required=True)
    p_gen.add_argument("--row-clusters", type=int, required=True)
    p_gen.add_argument(
        "--view",
        action="append",
        required=True,
        metavar="M,L,ETA,T",
        help="n_features, feature_clusters, noise, total_count (repeatable)",
    )
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)

    p_sweep = sub.add_parser("sweep", help="fit across a lambda grid")
    _fit_flags(p_sweep)
    p_sweep.add_argument(
        "--lambda-grid",
        type=str,
        default=None,
        help="comma-separated lambdas (default 2^-6..2^6)",
    )

    p_oracle = sub.add_parser("oracle")  # hidden: exhaustive tiny-instance solver
    p_oracle.add_argument("--manifest", required=True)
    p_oracle.add_argument("--k", type=int, required=True)
    p_oracle.add_argument("--l", type=str, default=None)
    p_oracle.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p_oracle.add_argument("--alpha", type=float, default=0.0)

    return parser


def _parse_l(raw, manifest, n_views):
    if raw is not None:
        try:
            values = [int(v) for v in raw.split(",")]
        except ValueError:
            raise UsageError(f"--l must be comma-separated integers, got {raw!r}")
        if len(values) == 1:
            values = values * n_views
        if len(values) != n_views:
            raise UsageError(
                f"--l lists {len(values)} counts for {n_views} views"
            )
        return tuple(values)
    return tuple(
        v.feature_cluster_count
        if v.feature_cluster_count is not None
        else DEFAULT_FEATURE_CLUSTERS
        for v in manifest.views
    )


def _validate_fit_args(args):
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    if args.lam <= 0:
        raise UsageError("--lambda must be positive")
    if args.epsilon < 0:
        raise UsageError("--epsilon must be nonnegative")
    if args.max_iter < 1:
        raise UsageError("--max-iter must be >= 1")
    if args.restarts < 1:
        raise UsageError("--restarts must be >= 1")
    if args.alpha < 0:
        raise UsageError("--alpha must be nonnegative")
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")


def _load_views(args):
    manifest, matrices = dataio.read_manifest(args.manifest)
    l = _parse_l(args.l, manifest, len(matrices))
    views = [normalize(m, args.alpha) for m in matrices]
    labels = dataio.load_manifest_labels(args.manifest, manifest)
    return manifest, views, labels, l


def _config_dict(config: SolverConfig) -> dict:
    return {
        "k": config.k,
        "l": list(config.l),
        "lambda": config.lam,
        "epsilon": config.epsilon,
        "max_iter": config.max_iter,
        "seed": config.seed,
        "restarts": config.restarts,
        "alpha": config.alpha,
    }


def _cmd_fit(args) -> int:
    _validate_fit_args(args)
    manifest, views, labels, l = _load_views(args)
    config = SolverConfig(
        k=args.k,
        l=l,
        lam=args.lam,
        epsilon=args.epsilon,
        max_iter=args.max_iter,
        seed=args.seed,
        restarts=args.restarts,
        alpha=args.alpha,
    )
    resolved = _config_dict(config)
    print("resolved configuration:", json.dumps(resolved, sort_keys=True))
    result = fit(config, views, labels=labels, threads=args.threads)
    dataio.write_fit_result(result, args.out, config=resolved)
    plots.save_trajectory_figure(
        result.state.trace, os.path.join(args.out, "trajectory.png")
    )
    print(
        f"fit: J={result.objective:.6g} iterations={result.iterations_used} "
        f"converged={result.converged}"
    )
    if result.metrics is not None:
        m = result.metrics
        print(
            f"metrics: purity={m.purity:.4f} nmi={m.nmi:.4f} "
            f"rand_index={m.rand_index:.4f}"
        )
    return EXIT_OK


def _cmd_eval(args) -> int:
    pred = dataio.read_labels(args.pred)
    truth = dataio.read_labels(args.labels)
    if len(pred) != len(truth):
        raise LengthError(
            f"pred has {len(pred)} labels, truth has {len(truth)}"
        )
    report = evaluate(pred, truth)
    payload = report.as_dict()
    print(json.dumps(payload, sort_keys=True))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def _parse_view_flag(raw):
    parts = raw.split(",")
    if len(parts) != 4:
        raise UsageError(f"--view expects M,L,ETA,T, got {raw!r}")
    try:
        return SynthViewSpec(
            n_features=int(parts[0]),
            feature_clusters=int(parts[1]),
            noise=float(parts[2]),
            total_count=int(parts[3]),
        )
    except ValueError:
        raise UsageError(f"--view expects M,L,ETA,T numbers, got {raw!r}")
    except InfeasibleConfigError:
        raise


def _cmd_gen(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if args.seed < 0:
        raise UsageError("--seed must be nonnegative for gen")
    view_specs = tuple(_parse_view_flag(raw) for raw in args.view)
    spec = SynthSpec(
        n_samples=args.samples,
        row_clusters=args.row_clusters,
        views=view_specs,
        seed=args.seed,
    )
    resolved = {
        "samples": args.samples,
        "row_clusters": args.row_clusters,
        "views": [
            [v.n_features, v.feature_clusters, v.noise, v.total_count]
            for v in view_specs
        ],
        "seed": args.seed,
    }
    print("resolved configuration:", json.dumps(resolved, sort_keys=True))
    dataset = generate(spec)
    os.makedirs(args.out, exist_ok=True)
    views = []
    for i, (vm, cl, vs) in enumerate(
        zip(dataset.views, dataset.col_labels, view_specs)
    ):
        name = f"view_{i}.mtx"
        dataio.write_view_matrix(vm, os.path.join(args.out, name))
        dataio.write_labels(cl, os.path.join(args.out, f"col_labels_{i}.txt"))
        views.append(dataio.ManifestView(name, vs.feature_clusters))
    dataio.write_labels(
        dataset.row_labels, os.path.join(args.out, "row_labels.txt")
    )
    manifest = dataio.DatasetManifest(
        n_samples=args.samples,
        views=tuple(views),
        labels_path="row_labels.txt",
        name="synthetic",
    )
    dataio.write_manifest(manifest, os.path.join(args.out, "manifest.json"))
    print(f"gen: wrote {len(views)} views to {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    _validate_fit_args(args)
    if args.lambda_grid is not None:
        try:
            grid = [float(v) for v in args.lambda_grid.split(",")]
        except ValueError:
            raise UsageError(f"bad --lambda-grid {args.lambda_grid!r}")
        if not grid or any(g <= 0 for g in grid):
            raise UsageError("--lambda-grid values must be positive")
    else:
        grid = list(DEFAULT_LAMBDA_GRID)
    manifest, views, labels, l = _load_views(args)
    os.makedirs(args.out, exist_ok=True)
    n_views = len(views)
    rows = []
    for lam in grid:
        config = SolverConfig(
            k=args.k,
            l=l,
            lam=lam,
            epsilon=args.epsilon,
            max_iter=args.max_iter,
            seed=args.seed,
            restarts=args.restarts,
            alpha=args.alpha,
        )
        result = fit(config, views, labels=labels, threads=args.threads)
        rows.append((lam, tuple(result.state.weights), result.objective,
                     result.metrics))
    fmt = dataio._fmt
    with open(
        os.path.join(args.out, "sweep.csv"), "w", encoding="utf-8", newline="\n"
    ) as fh:
        cols = ",".join(f"w_{i + 1}" for i in range(n_views))
        header = f"lambda,{cols},J"
        if labels is not None:
            header += ",purity,nmi,rand_index"
        fh.write(header + "\n")
        for lam, w, j, m in rows:
            line = ",".join([fmt(lam)] + [fmt(v) for v in w] + [fmt(j)])
            if labels is not None:
                line += f",{fmt(m.purity)},{fmt(m.nmi)},{fmt(m.rand_index)}"
            fh.write(line + "\n")
    plots.save_sweep_figure(
        [r[0] for r in rows],
        [r[1] for r in rows],
        [r[2] for r in rows],
        os.path.join(args.out, "sweep.png"),
        nmis=[r[3].nmi for r in rows] if labels is not None else None,
    )
    print(f"sweep: {len(rows)} lambdas written to {args.out}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    manifest, matrices = dataio.read_manifest(args.manifest)
    l = _parse_l(args.l, manifest, len(matrices))
    views = [normalize(m, args.alpha) for m in matrices]
    result = exhaustive_min(views, args.k, l, args.lam)
    print(
        json.dumps(
            {
                "global_min_objective": result.global_min_objective,
                "row_map": list(result.row_map),
                "col_maps": [list(c) for c in result.col_maps],
                "weights": list(result.weights),
                "n_optima_up_to_relabeling": result.n_optima_up_to_relabeling,
            },
            sort_keys=True,
        )
    )
    return EXIT_OK


_COMMANDS = {
    "fit": _cmd_fit,
    "eval": _cmd_eval,
    "gen": _cmd_gen,
    "sweep": _cmd_sweep,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleConfigError, SearchSpaceError) as exc:
        print(f"infeasible configuration: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()

"""Command-line entry point: run, analyze, landscape.

Exit codes: 0 success, 2 configuration/usage error, 3 I/O or data-format
error.
"""

from __future__ import annotations

import argparse
import glob
import math
import os
import sys

from . import metrics
from .combine import combine
from .landscape import landscape_grid, write_landscape_csv
from .optim import RunTrace
from .runner import (
    ConfigError,
    TraceFormatError,
    load_config,
    read_manifest,
    read_points,
    read_trace_events,
    run_experiment,
)
from .suite import PlacementPolicy, ProblemId, make_problem

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _fmt(value: float) -> str:
    return format(value, ".17g")


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        trace_set = run_experiment(config, args.out, workers=args.workers)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"ran {len(trace_set.traces)} runs into {args.out}")
    return EXIT_OK


def _load_all_traces(traces_dir: str):
    """Events of every run in the directory keyed by grid coordinates."""
    paths = sorted(glob.glob(os.path.join(traces_dir, "trace_*.csv")))
    events = {}
    for path in paths:
        for key, ev in read_trace_events(path).items():
            if key in events:
                raise TraceFormatError(path, 1, f"duplicate run key {key}")
            events[key] = ev
    return events


def _as_run_trace(events: list[tuple[int, float]], budget: int) -> RunTrace:
    import numpy as np

    return RunTrace(
        events=tuple(events),
        budget=budget,
        final_best=events[-1][1],
        final_best_point=np.zeros(0),
    )


def cmd_analyze(args) -> int:
    try:
        events = _load_all_traces(args.traces)
    except TraceFormatError as exc:
        print(f"trace format error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    if not events:
        print(f"error: no trace files in {args.traces}", file=sys.stderr)
        return EXIT_CONFIG

    manifest = read_manifest(args.traces)
    if manifest is not None:
        budget = int(manifest["budget"])
    else:
        budget = max(ev[-1][0] for ev in events.values())

    traces = {key: _as_run_trace(ev, budget) for key, ev in events.items()}
    grid = metrics.target_grid()

    by_instance: dict[tuple, list[RunTrace]] = {}
    by_cell_alg: dict[tuple, list[RunTrace]] = {}
    for (alg, pair, alpha, instance, _run), trace in traces.items():
        by_instance.setdefault((alg, pair, alpha, instance), []).append(trace)
        by_cell_alg.setdefault((alg, pair, alpha), []).append(trace)

    try:
        os.makedirs(args.out, exist_ok=True)

        with open(os.path.join(args.out, "auc.csv"), "w", newline="") as fh:
            fh.write("alg,f_first,f_second,alpha,instance,auc\n")
            for (alg, pair, alpha, instance) in sorted(by_instance):
                auc = metrics.ecdf_auc(
                    by_instance[(alg, pair, alpha, instance)], grid, budget, axis=args.axis
                )
                fh.write(
                    f"{alg},{pair[0]},{pair[1]},{alpha:.6f},{instance},{_fmt(auc)}\n"
                )

        with open(os.path.join(args.out, "ert.csv"), "w", newline="") as fh:
            fh.write("alg,f_first,f_second,alpha,instance,target,ert\n")
            for (alg, pair, alpha, instance) in sorted(by_instance):
                value = metrics.ert(
                    by_instance[(alg, pair, alpha, instance)], args.target, budget
                )
                ert_text = "inf" if math.isinf(value) else _fmt(value)
                fh.write(
                    f"{alg},{pair[0]},{pair[1]},{alpha:.6f},{instance},"
                    f"{_fmt(args.target)},{ert_text}\n"
                )

        pooled: dict[tuple, float] = {}
        for (alg, pair, alpha), cell_traces in by_cell_alg.items():
            pooled[(alg, pair, alpha, None)] = metrics.ecdf_auc(
                cell_traces, grid, budget, axis=args.axis
            )
        table = metrics.AUCTable(pooled)
        cells = sorted({(pair, alpha) for (_alg, pair, alpha, _i) in pooled})
        with open(os.path.join(args.out, "rank.csv"), "w", newline="") as fh:
            fh.write("f_first,f_second,alpha,alg,rank,tied\n")
            for pair, alpha in cells:
                for entry in metrics.rank_algorithms(table, (pair, alpha)):
                    tied = "true" if entry.tied else "false"
                    fh.write(
                        f"{pair[0]},{pair[1]},{alpha:.6f},{entry.algorithm},"
                        f"{entry.rank},{tied}\n"
                    )

        eval_grid = metrics.default_eval_grid(budget)
        with open(os.path.join(args.out, "traj.csv"), "w", newline="") as fh:
            fh.write("alg,f_first,f_second,alpha,evals,geomean\n")
            for (alg, pair, alpha) in sorted(by_cell_alg):
                curve = metrics.geomean_trajectory(
                    by_cell_alg[(alg, pair, alpha)], eval_grid
                )
                for t, g in zip(eval_grid, curve):
                    fh.write(
                        f"{alg},{pair[0]},{pair[1]},{alpha:.6f},{t},{_fmt(g)}\n"
                    )
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO

    print(f"wrote auc.csv, ert.csv, rank.csv, traj.csv to {args.out}")
    return EXIT_OK


def _overlay_points(traces_dir: str, pair: tuple[int, int], alpha: float):
    """Best-found points of all runs on (pair, alpha) from points CSVs."""
    points = []
    for path in sorted(glob.glob(os.path.join(traces_dir, "points_*.csv"))):
        for (alg, p, a, instance, run), (_best, coords) in sorted(
            read_points(path).items()
        ):
            if p == pair and f"{a:.6f}" == f"{alpha:.6f}" and len(coords) == 2:
                points.append(coords)
    return points


def cmd_landscape(args) -> int:
    if args.dim != 2:
        print(f"error: landscape grids require --dim 2, got {args.dim}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        alphas = [float(tok) for arg in args.alpha for tok in arg.split(",") if tok]
    except ValueError:
        print(f"config error: invalid --alpha value in {args.alpha}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        first = make_problem(ProblemId(args.f1, args.i1, 2), PlacementPolicy())
        second = make_problem(ProblemId(args.f2, 1, 2), PlacementPolicy())
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        os.makedirs(args.out, exist_ok=True)
        for alpha in alphas:
            try:
                problem = combine(first, second, alpha)
            except ValueError as exc:
                print(f"config error: {exc}", file=sys.stderr)
                return EXIT_CONFIG
            overlay = ()
            if args.overlay:
                try:
                    overlay = tuple(
                        _overlay_points(args.overlay, (args.f1, args.f2), alpha)
                    )
                except TraceFormatError as exc:
                    print(f"trace format error: {exc}", file=sys.stderr)
                    return EXIT_IO
            grid = landscape_grid(problem, resolution=args.resolution, overlay=overlay)
            path = os.path.join(
                args.out, f"landscape_f{args.f1}_f{args.f2}_a{alpha:.6f}.csv"
            )
            write_landscape_csv(grid, path)
            print(f"wrote {path}")
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affinebench",
        description="Run and analyze optimizer benchmarks on affine function combinations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a TOML config")
    p_run.add_argument("--config", required=True, help="experiment TOML file")
    p_run.add_argument("--workers", type=int, default=1, help="parallel worker count")
    p_run.add_argument("--out", required=True, help="output directory for traces")
    p_run.set_defaults(func=cmd_run)

    p_an = sub.add_parser("analyze", help="compute metric CSVs from traces")
    p_an.add_argument("--traces", required=True, help="directory with trace CSVs")
    p_an.add_argument("--out", required=True, help="output directory for metric CSVs")
    p_an.add_argument("--target", type=float, default=1e-8, help="ERT precision target")
    p_an.add_argument("--axis", choices=("log", "linear"), default="log", help="AUC evaluation axis")
    p_an.set_defaults(func=cmd_analyze)

    p_ls = sub.add_parser("landscape", help="emit 2-D landscape grid CSVs")
    p_ls.add_argument("--f1", type=int, required=True, help="first function id")
    p_ls.add_argument("--f2", type=int, required=True, help="second function id")
    p_ls.add_argument("--i1", type=int, default=1, help="instance of the first function")
    p_ls.add_argument("--alpha", nargs="+", required=True,
                      help="alpha values (space or comma separated)")
    p_ls.add_argument("--dim", type=int, default=2, help="dimension (must be 2)")
    p_ls.add_argument("--resolution", type=int, default=201, help="grid points per axis")
    p_ls.add_argument("--overlay", default=None, help="trace directory for best-point overlays")
    p_ls.add_argument("--out", required=True, help="output directory for grid CSVs")
    p_ls.set_defaults(func=cmd_landscape)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

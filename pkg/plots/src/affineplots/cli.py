"""One command per figure kind, each reading harness CSVs and writing an image.

Exit codes match the harness CLI: 0 success, 2 bad arguments or schema
mismatch (with a column diagnostic), 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, render
from .schema import SchemaError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

_DESCRIPTIONS = {
    "heatmap": "alpha-vs-function AUC heatmap from auc.csv",
    "rankgrid": "best-algorithm grid from rank.csv",
    "ert_scatter": "per-instance ERT scatter from ert.csv",
    "auc_grid": "pooled AUC facet grid from auc.csv",
    "auc_scatter": "per-instance AUC scatter from auc.csv",
    "convergence": "geometric-mean convergence curves from traj.csv",
    "landscape": "landscape frames with optimum/best markers from landscape CSVs",
}


def _build_parser(kind: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=f"affineplot-{kind.replace('_', '-')}",
        description=_DESCRIPTIONS[kind],
    )
    multi = kind == "landscape"
    parser.add_argument(
        "--in", dest="inputs", nargs="+" if multi else None, required=True,
        metavar="CSV", help="input CSV path" + ("(s)" if multi else ""),
    )
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--title", default=None, help="figure title override")
    return parser


def _run(kind: str, argv: list[str] | None) -> int:
    args = _build_parser(kind).parse_args(argv)
    inputs = tuple(args.inputs) if isinstance(args.inputs, list) else (args.inputs,)
    try:
        spec = FigureSpec(kind=kind, inputs=inputs, output=args.out, title=args.title)
        render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {args.out}")
    return EXIT_OK


def main_heatmap(argv: list[str] | None = None) -> int:
    return _run("heatmap", argv)


def main_rankgrid(argv: list[str] | None = None) -> int:
    return _run("rankgrid", argv)


def main_ert_scatter(argv: list[str] | None = None) -> int:
    return _run("ert_scatter", argv)


def main_auc_grid(argv: list[str] | None = None) -> int:
    return _run("auc_grid", argv)


def main_auc_scatter(argv: list[str] | None = None) -> int:
    return _run("auc_scatter", argv)


def main_convergence(argv: list[str] | None = None) -> int:
    return _run("convergence", argv)


def main_landscape(argv: list[str] | None = None) -> int:
    return _run("landscape", argv)


MAINS = {
    "heatmap": main_heatmap,
    "rankgrid": main_rankgrid,
    "ert_scatter": main_ert_scatter,
    "auc_grid": main_auc_grid,
    "auc_scatter": main_auc_scatter,
    "convergence": main_convergence,
    "landscape": main_landscape,
}

assert tuple(MAINS) == KINDS

"""CSV schema contracts for the benchmark outputs consumed by the renderers.

The renderers read the harness CSVs exactly as documented: header columns
must match name-for-name and in order, `#` lines are metadata comments, and
landscape files carry `# optimum: x y` and `# best: x y` marker comments.
Any mismatch raises SchemaError naming the offending columns so the CLI can
exit nonzero with a usable diagnostic.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import pandas as pd

SCHEMAS: dict[str, tuple[str, ...]] = {
    "auc": ("alg", "f_first", "f_second", "alpha", "instance", "auc"),
    "ert": ("alg", "f_first", "f_second", "alpha", "instance", "target", "ert"),
    "rank": ("f_first", "f_second", "alpha", "alg", "rank", "tied"),
    "traj": ("alg", "f_first", "f_second", "alpha", "evals", "geomean"),
    "landscape": ("x", "y", "log10_value"),
}

# columns converted to floats/ints after the header check; the rest stay text
_NUMERIC: dict[str, tuple[str, ...]] = {
    "auc": ("f_first", "f_second", "alpha", "instance", "auc"),
    "ert": ("f_first", "f_second", "alpha", "instance", "target", "ert"),
    "rank": ("f_first", "f_second", "alpha", "rank"),
    "traj": ("f_first", "f_second", "alpha", "evals", "geomean"),
    "landscape": ("x", "y", "log10_value"),
}

_INTEGER = ("f_first", "f_second", "instance", "rank", "evals")


class SchemaError(ValueError):
    """Input CSV does not match the documented schema."""


def _check_header(path: str, found: tuple[str, ...], expected: tuple[str, ...]) -> None:
    if found == expected:
        return
    parts = [
        f"{path}: header mismatch: expected columns "
        f"{','.join(expected)}; got {','.join(found)}"
    ]
    missing = [c for c in expected if c not in found]
    unexpected = [c for c in found if c not in expected]
    if missing:
        parts.append(f"missing: {','.join(missing)}")
    if unexpected:
        parts.append(f"unexpected: {','.join(unexpected)}")
    raise SchemaError("; ".join(parts))


def _coerce(path: str, df: pd.DataFrame, kind: str) -> pd.DataFrame:
    for col in _NUMERIC[kind]:
        try:
            df[col] = pd.to_numeric(df[col])
        except (ValueError, TypeError) as exc:
            raise SchemaError(f"{path}: column {col!r} is not numeric: {exc}") from exc
        if col in _INTEGER:
            df[col] = df[col].astype(int)
    if kind == "rank":
        bad = set(df["tied"]) - {"true", "false"}
        if bad:
            raise SchemaError(f"{path}: column 'tied' must be true/false, got {sorted(bad)}")
        df["tied"] = df["tied"] == "true"
    return df


def _read_csv(path: str, kind: str, text: str | None = None) -> pd.DataFrame:
    expected = SCHEMAS[kind]
    source = io.StringIO(text) if text is not None else path
    try:
        df = pd.read_csv(source, comment="#", dtype=str, skip_blank_lines=True)
    except pd.errors.EmptyDataError as exc:
        raise SchemaError(f"{path}: no header row found") from exc
    _check_header(path, tuple(df.columns), expected)
    if df.isna().any().any() or len(df) == 0:
        raise SchemaError(f"{path}: missing fields or no data rows")
    return _coerce(path, df, kind)


def load_table(path: str, kind: str) -> pd.DataFrame:
    """Read one harness CSV, validating header and field types."""
    if kind not in SCHEMAS:
        raise ValueError(f"unknown table kind {kind!r}")
    return _read_csv(path, kind)


@dataclass(frozen=True)
class LandscapeData:
    """One landscape grid CSV plus its marker comments."""

    optimum: tuple[float, float] | None
    best: tuple[tuple[float, float], ...]
    table: pd.DataFrame
    source: str

    def grid(self):
        """Pivot rows into (xs, ys, Z) with Z[yi, xi] = log10_value."""
        try:
            pivot = self.table.pivot(index="y", columns="x", values="log10_value")
        except ValueError as exc:
            raise SchemaError(f"{self.source}: duplicate (x, y) rows: {exc}") from exc
        pivot = pivot.sort_index().sort_index(axis=1)
        return pivot.columns.to_numpy(), pivot.index.to_numpy(), pivot.to_numpy()


def _parse_marker(path: str, line: str, lineno: int) -> tuple[float, float]:
    fields = line.split(":", 1)[1].split()
    if len(fields) != 2:
        raise SchemaError(f"{path}:{lineno}: marker comment needs two coordinates")
    try:
        return float(fields[0]), float(fields[1])
    except ValueError as exc:
        raise SchemaError(f"{path}:{lineno}: bad marker coordinate: {exc}") from exc


def load_landscape(path: str) -> LandscapeData:
    """Read one landscape CSV including optimum/best marker comments."""
    optimum = None
    best: list[tuple[float, float]] = []
    data_lines: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if line.startswith("# optimum:"):
                optimum = _parse_marker(path, line, lineno)
            elif line.startswith("# best:"):
                best.append(_parse_marker(path, line, lineno))
            elif line:
                data_lines.append(line)
    table = _read_csv(path, "landscape", text="\n".join(data_lines) + "\n")
    return LandscapeData(optimum, tuple(best), table, path)

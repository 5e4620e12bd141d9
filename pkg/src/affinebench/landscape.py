"""2-D landscape grids of combined problems, emitted as CSV.

The grid covers [-5, 5]^2 inclusively and stores log10 of the combined value
(finite thanks to the evaluation floor).  Rendering is someone else's job;
this module only computes and serializes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .combine import CombinedProblem

BOUNDS = (-5.0, 5.0)


@dataclass(frozen=True)
class LandscapeGrid:
    """log10-scaled values on a square inclusive grid over [-5, 5]^2."""

    resolution: int
    xs: np.ndarray
    ys: np.ndarray
    log10_values: np.ndarray
    optimum: np.ndarray
    overlay: tuple[np.ndarray, ...] = ()

    def minimum_cell(self) -> tuple[float, float]:
        """Grid coordinates of the smallest value (first hit in scan order)."""
        flat = int(np.argmin(self.log10_values))
        i, j = divmod(flat, self.resolution)
        return float(self.xs[i]), float(self.ys[j])


def landscape_grid(
    problem: CombinedProblem,
    resolution: int = 201,
    overlay: tuple[np.ndarray, ...] = (),
) -> LandscapeGrid:
    """Evaluate the combined problem on a resolution x resolution grid."""
    if problem.dimension != 2:
        raise ValueError(f"landscape grids are 2-D only, got D={problem.dimension}")
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    xs = np.linspace(BOUNDS[0], BOUNDS[1], resolution)
    ys = np.linspace(BOUNDS[0], BOUNDS[1], resolution)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    points = np.column_stack([gx.ravel(), gy.ravel()])
    values = problem.evaluate(points).reshape(resolution, resolution)
    if not np.all(np.isfinite(values)):
        raise ArithmeticError("non-finite landscape values")
    log_values = np.log10(np.maximum(values, problem.floor_eps))
    return LandscapeGrid(
        resolution=resolution,
        xs=xs,
        ys=ys,
        log10_values=log_values,
        optimum=np.array(problem.optimum_location, dtype=float),
        overlay=tuple(np.asarray(p, dtype=float) for p in overlay),
    )


def _fmt(value: float) -> str:
    return format(value, ".17g")


def write_landscape_csv(grid: LandscapeGrid, path: str) -> None:
    """Write `x,y,log10_value` rows prefixed by optimum/best marker comments."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# optimum: {_fmt(grid.optimum[0])} {_fmt(grid.optimum[1])}\n")
        for point in grid.overlay:
            fh.write(f"# best: {_fmt(point[0])} {_fmt(point[1])}\n")
        fh.write("x,y,log10_value\n")
        for i in range(grid.resolution):
            x = _fmt(grid.xs[i])
            for j in range(grid.resolution):
                fh.write(f"{x},{_fmt(grid.ys[j])},{_fmt(grid.log10_values[i, j])}\n")


def read_landscape_csv(path: str):
    """Parse a landscape CSV back into (optimum, best points, rows)."""
    optimum = None
    best: list[tuple[float, float]] = []
    rows: list[tuple[float, float, float]] = []
    with open(path, "r", newline="") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("# optimum:"):
                parts = line.split(":", 1)[1].split()
                optimum = (float(parts[0]), float(parts[1]))
            elif line.startswith("# best:"):
                parts = line.split(":", 1)[1].split()
                best.append((float(parts[0]), float(parts[1])))
            elif line.startswith("#") or line.startswith("x,"):
                continue
            else:
                a, b, c = line.split(",")
                rows.append((float(a), float(b), float(c)))
    if optimum is None:
        raise ValueError(f"{path}: missing optimum marker")
    if math.isnan(optimum[0]):
        raise ValueError(f"{path}: bad optimum marker")
    return optimum, best, rows

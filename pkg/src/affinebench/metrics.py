"""Fixed-target performance statistics over improvement-event traces.

Everything here is a pure function of immutable trace data: the 51-target
grid, per-run hitting times, ECDF curves and their normalized AUC, expected
running time, geometric-mean convergence trajectories, and per-cell algorithm
rankings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .optim import RunTrace

Pair = tuple[int, int]
AUCKey = tuple[str, Pair, float, "int | None"]


@dataclass(frozen=True)
class TargetGrid:
    """Strictly decreasing precision targets."""

    targets: tuple[float, ...]

    def __post_init__(self):
        if len(self.targets) < 1:
            raise ValueError("target grid must be nonempty")
        if any(b >= a for a, b in zip(self.targets, self.targets[1:])):
            raise ValueError("targets must be strictly decreasing")

    def __len__(self) -> int:
        return len(self.targets)


def target_grid() -> TargetGrid:
    """The default grid: 51 targets 10^2, 10^1.8, ..., 10^-8."""
    return TargetGrid(tuple(10.0 ** (2.0 - 0.2 * i) for i in range(51)))


def hitting_times(trace: RunTrace, grid: TargetGrid) -> list[int | None]:
    """First evaluation count at which each target is reached, or None.

    Best-so-far between events equals the previous event's value, so the
    first event with value <= target is the hit.
    """
    hits: list[int | None] = [None] * len(grid)
    idx = 0
    targets = grid.targets
    for evals, value in trace.events:
        while idx < len(targets) and value <= targets[idx]:
            hits[idx] = evals
            idx += 1
        if idx == len(targets):
            break
    return hits


@dataclass(frozen=True)
class ECDFCurve:
    """Proportion of (run, target) pairs hit, as a step function of the
    evaluation count; nondecreasing with values in [0, 1]."""

    budget: int
    points: tuple[tuple[int, float], ...]

    def proportion_at(self, evaluations: int) -> float:
        prop = 0.0
        for t, p in self.points:
            if t > evaluations:
                break
            prop = p
        return prop


def _collect_hits(traces: Iterable[RunTrace], grid: TargetGrid, budget: int) -> tuple[list[int], int]:
    """All hitting times pooled over runs, plus the (run, target) pair count."""
    all_hits: list[int] = []
    n_runs = 0
    for trace in traces:
        n_runs += 1
        for t in hitting_times(trace, grid):
            if t is not None and t <= budget:
                all_hits.append(t)
    if n_runs == 0:
        raise ValueError("empty trace collection")
    return all_hits, n_runs * len(grid)


def ecdf_curve(traces: Iterable[RunTrace], grid: TargetGrid, budget: int) -> ECDFCurve:
    """Pooled ECDF sampled at a geometric evaluation grid plus every hit."""
    hits, n_pairs = _collect_hits(traces, grid, budget)
    sample_at = {1, budget}
    t = 1.0
    while t < budget:
        sample_at.add(int(round(t)))
        t *= 10.0 ** 0.05
    sample_at.update(hits)
    counts = np.sort(np.asarray(hits, dtype=np.int64))
    points = []
    for t in sorted(sample_at):
        hit_count = int(np.searchsorted(counts, t, side="right"))
        points.append((t, hit_count / n_pairs))
    return ECDFCurve(budget=budget, points=tuple(points))


def ecdf_auc(
    traces: Iterable[RunTrace],
    grid: TargetGrid,
    budget: int,
    axis: str = "log",
) -> float:
    """Normalized area under the pooled ECDF curve.

    Each hit at evaluation t contributes weight 1 - ln(t)/ln(budget) on the
    log axis (the default), or 1 - (t-1)/budget on the linear axis; misses
    contribute 0. The mean weight over all (run, target) pairs is the AUC,
    so hitting everything at evaluation 1 scores exactly 1.
    """
    if axis not in ("log", "linear"):
        raise ValueError(f"axis must be 'log' or 'linear', got {axis!r}")
    hits, n_pairs = _collect_hits(traces, grid, budget)
    if not hits:
        return 0.0
    t = np.asarray(hits, dtype=float)
    if axis == "log":
        weights = 1.0 - np.log(t) / math.log(budget) if budget > 1 else np.ones_like(t)
    else:
        weights = 1.0 - (t - 1.0) / budget
    return float(np.sum(weights) / n_pairs)


def ert(traces: Iterable[RunTrace], target: float, budget: int) -> float:
    """Expected running time to reach ``target``.

    Sum of evaluations until the hit (misses spend the full budget), divided
    by the number of hitting runs; inf when nothing hits.
    """
    single = TargetGrid((target,))
    spent = 0
    successes = 0
    for trace in traces:
        hit = hitting_times(trace, single)[0]
        if hit is not None and hit <= budget:
            spent += hit
            successes += 1
        else:
            spent += budget
    if successes == 0:
        return math.inf
    return spent / successes


def geomean_trajectory(
    traces: Sequence[RunTrace],
    eval_grid: Sequence[int],
    floor: float = 1e-12,
) -> np.ndarray:
    """Geometric mean of floored best-so-far values at each grid point."""
    if not traces:
        raise ValueError("empty trace collection")
    logs = np.empty((len(traces), len(eval_grid)))
    for r, trace in enumerate(traces):
        for c, t in enumerate(eval_grid):
            logs[r, c] = math.log(max(trace.best_at(t), floor))
    return np.exp(logs.mean(axis=0))


def default_eval_grid(budget: int, points_per_decade: int = 20) -> list[int]:
    """Geometric evaluation grid from 1 to budget, deduplicated."""
    grid = {1, budget}
    t = 1.0
    step = 10.0 ** (1.0 / points_per_decade)
    while t < budget:
        grid.add(int(round(t)))
        t *= step
    return sorted(grid)


@dataclass(frozen=True)
class AUCTable:
    """Normalized AUC values keyed by (algorithm, pair, alpha, instance).

    An instance of None holds the value pooled over all runs of the cell.
    """

    values: Mapping[AUCKey, float]

    def __post_init__(self):
        for key, value in self.values.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"AUC outside [0,1] for {key}: {value}")

    def cell(self, pair: Pair, alpha: float) -> dict[str, float]:
        """Pooled AUC per algorithm for one (pair, alpha) cell."""
        out = {}
        for (alg, p, a, instance), value in self.values.items():
            if instance is None and p == pair and a == alpha:
                out[alg] = value
        return out


@dataclass(frozen=True)
class RankEntry:
    algorithm: str
    rank: int
    tied: bool


def rank_algorithms(auc: AUCTable, cell: tuple[Pair, float]) -> list[RankEntry]:
    """Rank algorithms by descending pooled AUC within one cell.

    Exact ties share the smallest applicable rank and are flagged; output is
    ordered by (rank, algorithm name).
    """
    pair, alpha = cell
    scores = auc.cell(pair, alpha)
    if not scores:
        raise KeyError(f"no AUC entries for pair {pair} at alpha {alpha}")
    entries = []
    values = list(scores.values())
    for alg, score in scores.items():
        rank = 1 + sum(v > score for v in values)
        entries.append(RankEntry(alg, rank, values.count(score) > 1))
    entries.sort(key=lambda e: (e.rank, e.algorithm))
    return entries

import math

import numpy as np
import pytest

from affinebench.metrics import (
    AUCTable,
    RankEntry,
    TargetGrid,
    default_eval_grid,
    ecdf_auc,
    ecdf_curve,
    ert,
    geomean_trajectory,
    hitting_times,
    rank_algorithms,
    target_grid,
)
from affinebench.optim import RunTrace


def _trace(events, budget):
    return RunTrace(
        events=tuple(events),
        budget=budget,
        final_best=events[-1][1],
        final_best_point=np.zeros(2),
    )


def _random_traces(rng, budget, max_runs=5):
    """Synthetic improvement traces with random event counts and levels."""
    traces = []
    for _ in range(rng.integers(1, max_runs + 1)):
        n_events = min(int(rng.integers(1, 12)), budget)
        evals = np.sort(rng.choice(np.arange(1, budget + 1), size=n_events, replace=False))
        evals[0] = 1  # traces always record the first evaluation
        values = np.sort(10.0 ** rng.uniform(-10, 4, size=n_events))[::-1]
        traces.append(_trace(list(zip(evals.tolist(), values.tolist())), budget))
    return traces


def _brute_force_auc(traces, grid, budget, axis):
    """Integrate the pooled ECDF step function over every evaluation."""
    hits = []
    for trace in traces:
        hits.extend(t for t in hitting_times(trace, grid) if t is not None and t <= budget)
    n_pairs = len(traces) * len(grid)
    hits = np.asarray(hits)
    total = 0.0
    if axis == "log":
        if budget == 1:
            return float(np.sum(hits == 1)) / n_pairs if len(hits) else 0.0
        for t in range(1, budget):
            prop = float(np.sum(hits <= t)) / n_pairs
            total += prop * (math.log(t + 1) - math.log(t)) / math.log(budget)
    else:
        for t in range(1, budget + 1):
            prop = float(np.sum(hits <= t)) / n_pairs
            total += prop / budget
    return total


def test_target_grid_shape():
    grid = target_grid()
    assert len(grid) == 51
    assert grid.targets[0] == 1e2
    assert grid.targets[50] == 1e-8
    assert grid.targets[25] == 1e-3
    ratios = np.array(grid.targets[1:]) / np.array(grid.targets[:-1])
    assert np.max(ratios) - np.min(ratios) < 1e-12
    assert all(b < a for a, b in zip(grid.targets, grid.targets[1:]))


def test_target_grid_validation():
    with pytest.raises(ValueError):
        TargetGrid(())
    with pytest.raises(ValueError):
        TargetGrid((1.0, 2.0))


def test_hitting_times_examples():
    grid = target_grid()
    assert hitting_times(_trace([(1, 1e3)], 100), grid) == [None] * 51

    hits = hitting_times(_trace([(1, 50.0)], 100), grid)
    expected = [1 if 50.0 <= t else None for t in grid.targets]
    assert hits == expected
    assert hits[0] == 1 and hits[1] == 1 and hits[2] is None  # 10^1.6 < 50 < 10^1.8

    hits = hitting_times(_trace([(1, 90.0), (10, 1e-9)], 100), grid)
    assert hits[0] == 1
    assert all(h == 10 for h in hits[1:])


def test_auc_extremes():
    grid = target_grid()
    assert ecdf_auc([_trace([(1, 1e-9)], 100)], grid, 100) == 1.0
    assert ecdf_auc([_trace([(1, 1e3)], 100)], grid, 100) == 0.0


def test_auc_single_hit_example():
    grid = target_grid()
    # one run, budget 100, only targets[0] hit, at evaluation 10
    trace = _trace([(1, 500.0), (10, 70.0)], 100)
    expected = (1.0 - math.log(10) / math.log(100)) / 51
    assert ecdf_auc([trace], grid, 100) == pytest.approx(expected, abs=1e-15)


def test_auc_orders_axes_differently():
    grid = target_grid()
    trace = _trace([(1, 500.0), (10, 70.0)], 100)
    log_auc = ecdf_auc([trace], grid, 100, axis="log")
    lin_auc = ecdf_auc([trace], grid, 100, axis="linear")
    assert log_auc != lin_auc
    assert lin_auc == pytest.approx((1.0 - 9.0 / 100.0) / 51, abs=1e-15)


def test_auc_rejects_bad_axis_and_empty():
    grid = target_grid()
    with pytest.raises(ValueError):
        ecdf_auc([_trace([(1, 1.0)], 10)], grid, 10, axis="sqrt")
    with pytest.raises(ValueError):
        ecdf_auc([], grid, 10)


def test_auc_matches_brute_force_on_random_traces():
    grid = target_grid()
    rng = np.random.default_rng(12)
    for _ in range(100):
        budget = int(rng.integers(2, 1001))
        traces = _random_traces(rng, budget)
        for axis in ("log", "linear"):
            fast = ecdf_auc(traces, grid, budget, axis=axis)
            slow = _brute_force_auc(traces, grid, budget, axis)
            assert abs(fast - slow) < 1e-12


def test_auc_monotone_under_extra_hits():
    grid = target_grid()
    rng = np.random.default_rng(13)
    for _ in range(50):
        budget = int(rng.integers(10, 500))
        traces = _random_traces(rng, budget)
        base = ecdf_auc(traces, grid, budget)
        last_eval, last_val = traces[0].events[-1]
        if last_eval < budget and last_val > 1e-12:
            extended = list(traces[0].events) + [(budget, last_val / 10.0)]
            improved = [_trace(extended, budget)] + list(traces[1:])
            # monotone up to summation rounding
            assert ecdf_auc(improved, grid, budget) >= base - 1e-12


def test_ecdf_curve_monotone():
    rng = np.random.default_rng(14)
    traces = _random_traces(rng, 300)
    curve = ecdf_curve(traces, target_grid(), 300)
    props = [p for _, p in curve.points]
    assert all(0.0 <= p <= 1.0 for p in props)
    assert all(a <= b for a, b in zip(props, props[1:]))
    assert curve.proportion_at(300) == props[-1]


def test_ert_examples():
    budget = 1000
    hit = _trace([(1, 10.0), (100, 1e-9)], budget)
    miss = _trace([(1, 10.0)], budget)
    assert ert([hit, miss], 1e-8, budget) == 1100.0
    assert ert([miss, miss], 1e-8, budget) == math.inf
    hits = [_trace([(t, 1e-9)], budget) for t in (10, 20, 30, 40, 50)]
    assert ert(hits, 1e-8, budget) == 30.0


def test_ert_against_manual_loop():
    rng = np.random.default_rng(15)
    for _ in range(200):
        budget = int(rng.integers(2, 1001))
        traces = _random_traces(rng, budget)
        target = 10.0 ** rng.uniform(-10, 3)
        spent, successes = 0, 0
        for trace in traces:
            best = math.inf
            hit_at = None
            for e, v in trace.events:
                if v <= target:
                    hit_at = e
                    break
            if hit_at is None:
                spent += budget
            else:
                spent += hit_at
                successes += 1
        expected = math.inf if successes == 0 else spent / successes
        assert ert(traces, target, budget) == expected


def test_geomean_trajectory():
    budget = 100
    a = _trace([(1, 4.0)], budget)
    b = _trace([(1, 9.0)], budget)
    out = geomean_trajectory([a, b], [1, 50, 100])
    assert np.allclose(out, 6.0)

    single = _trace([(1, 100.0), (10, 1.0)], budget)
    out = geomean_trajectory([single], [1, 9, 10, 100])
    assert np.allclose(out, [100.0, 100.0, 1.0, 1.0])

    rng = np.random.default_rng(16)
    traces = _random_traces(rng, budget)
    curve = geomean_trajectory(traces, list(range(1, 101)))
    assert np.all(np.diff(curve) <= 0)


def test_geomean_floor():
    budget = 10
    t = _trace([(1, 1e-30)], budget)
    out = geomean_trajectory([t], [5], floor=1e-12)
    assert out[0] == pytest.approx(1e-12, rel=1e-12)


def test_default_eval_grid():
    grid = default_eval_grid(1000)
    assert grid[0] == 1 and grid[-1] == 1000
    assert grid == sorted(set(grid))


def test_rank_algorithms():
    pair = (3, 1)
    table = AUCTable(
        {
            ("a", pair, 0.5, None): 0.9,
            ("b", pair, 0.5, None): 0.5,
            ("c", pair, 0.5, None): 0.5,
            ("d", pair, 0.5, None): 0.1,
        }
    )
    entries = rank_algorithms(table, (pair, 0.5))
    assert [(e.algorithm, e.rank, e.tied) for e in entries] == [
        ("a", 1, False),
        ("b", 2, True),
        ("c", 2, True),
        ("d", 4, False),
    ]


def test_rank_single_algorithm_and_missing_cell():
    pair = (3, 1)
    table = AUCTable({("solo", pair, 0.0, None): 0.4})
    assert rank_algorithms(table, (pair, 0.0)) == [RankEntry("solo", 1, False)]
    with pytest.raises(KeyError):
        rank_algorithms(table, (pair, 0.25))


def test_auc_table_validation():
    with pytest.raises(ValueError):
        AUCTable({("a", (1, 1), 0.0, None): 1.5})

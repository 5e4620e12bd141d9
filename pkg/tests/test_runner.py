import os

import numpy as np
import pytest

from affinebench.optim import AlgorithmConfig
from affinebench.rng import mix64
from affinebench.runner import (
    ConfigError,
    ExperimentConfig,
    TraceFormatError,
    config_from_dict,
    derive_seed,
    execute_grid,
    load_config,
    read_points,
    read_trace_events,
    run_experiment,
    write_trace_files,
)
from affinebench.suite import PlacementPolicy


def _tiny_config(**overrides):
    base = dict(
        pairs=((3, 1),),
        algorithms=(AlgorithmConfig(name="de", population_size=8),),
        alphas=(0.0, 1.0),
        instances_first=(1,),
        runs_per_instance=1,
        dimension=2,
        budget_multiplier=30,
        master_seed=99,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_derive_seed_goldens():
    assert derive_seed(0, 0, 0, 0, 0, 0) == mix64(0) == 16294208416658607535
    assert derive_seed(0, 0, 0, 0, 0, 1) == 10444661155033039891
    assert derive_seed(5, 1, 2, 3, 4, 0) == derive_seed(5, 1, 2, 3, 4, 0)
    seeds = {
        derive_seed(0, a, p, l, i, r)
        for a in range(2)
        for p in range(2)
        for l in range(2)
        for i in range(2)
        for r in range(2)
    }
    assert len(seeds) == 32


def test_config_budget_and_policy_defaults():
    config = _tiny_config()
    assert config.budget == 60
    assert config.policy_for(3) == PlacementPolicy()
    fixed = PlacementPolicy(mode="fixed_norm", norm=1.0)
    config = _tiny_config(placement_policy={21: fixed})
    assert config.policy_for(21) == fixed
    assert config.policy_for(1) == PlacementPolicy()


def test_config_validation():
    with pytest.raises(ConfigError):
        _tiny_config(pairs=())
    with pytest.raises(ConfigError):
        _tiny_config(pairs=((3, 1), (3, 1)))
    with pytest.raises(ConfigError):
        _tiny_config(pairs=((4, 1),))
    with pytest.raises(ConfigError):
        _tiny_config(algorithms=())
    with pytest.raises(ConfigError):
        _tiny_config(alphas=(0.0, 1.5))
    with pytest.raises(ConfigError):
        _tiny_config(alphas=(0.5, 0.5))
    with pytest.raises(ConfigError):
        _tiny_config(instances_first=(0,))
    with pytest.raises(ConfigError):
        _tiny_config(runs_per_instance=0)
    with pytest.raises(ConfigError):
        _tiny_config(dimension=1)
    with pytest.raises(ConfigError):
        _tiny_config(budget_multiplier=0)
    with pytest.raises(ConfigError):
        _tiny_config(placement_policy={7: PlacementPolicy()})
    with pytest.raises(ConfigError):
        _tiny_config(
            algorithms=(
                AlgorithmConfig(name="de"),
                AlgorithmConfig(name="pso", label="de"),
            )
        )


def test_grid_size_and_key_uniqueness():
    config = _tiny_config(
        alphas=(0.0, 0.5, 1.0),
        instances_first=(1, 2),
        runs_per_instance=2,
        algorithms=(
            AlgorithmConfig(name="de", population_size=8),
            AlgorithmConfig(name="dcma"),
        ),
    )
    traces = execute_grid(config)
    assert len(traces) == 2 * 1 * 3 * 2 * 2
    for (alg, pair, alpha, instance, run), trace in traces.items():
        assert alg in ("de", "dcma")
        assert trace.budget == config.budget


def test_execution_is_worker_count_independent():
    config = _tiny_config(alphas=(0.0, 0.5, 1.0), runs_per_instance=2)
    serial = execute_grid(config, workers=1)
    parallel = execute_grid(config, workers=2)
    assert serial.keys() == parallel.keys()
    for key in serial:
        assert serial[key].events == parallel[key].events
        assert np.array_equal(
            serial[key].final_best_point, parallel[key].final_best_point
        )


def test_run_experiment_writes_expected_files(tmp_path):
    config = _tiny_config(
        pairs=((3, 1), (21, 9)),
        algorithms=(
            AlgorithmConfig(name="de", population_size=8),
            AlgorithmConfig(name="dcma"),
        ),
    )
    out = tmp_path / "traces"
    trace_set = run_experiment(config, str(out))
    assert len(trace_set.traces) == 2 * 2 * 2 * 1 * 1
    names = sorted(os.listdir(out))
    assert "manifest.json" in names
    assert "_INCOMPLETE" not in names
    assert sum(n.startswith("trace_") for n in names) == 4
    assert sum(n.startswith("points_") for n in names) == 4
    header = "alg,f_first,f_second,alpha,instance,run,evals,best"
    text = (out / "trace_de_f3_f1.csv").read_text().splitlines()
    assert text[0].startswith("# generated:")
    assert text[1] == header


def _data_lines(path):
    with open(path) as fh:
        return [line for line in fh if not line.startswith("#")]


def test_rerun_is_byte_identical(tmp_path):
    config = _tiny_config(alphas=(0.0, 0.25, 1.0))
    run_experiment(config, str(tmp_path / "a"))
    run_experiment(config, str(tmp_path / "b"))
    assert _data_lines(tmp_path / "a" / "trace_de_f3_f1.csv") == _data_lines(
        tmp_path / "b" / "trace_de_f3_f1.csv"
    )
    assert _data_lines(tmp_path / "a" / "points_de_f3_f1.csv") == _data_lines(
        tmp_path / "b" / "points_de_f3_f1.csv"
    )


def test_trace_round_trip(tmp_path):
    config = _tiny_config(alphas=(0.0, 0.5), runs_per_instance=2)
    trace_set = run_experiment(config, str(tmp_path))
    parsed = read_trace_events(str(tmp_path / "trace_de_f3_f1.csv"))
    assert set(parsed) == set(trace_set.traces)
    for key, events in parsed.items():
        assert events == list(trace_set.traces[key].events)


def test_points_round_trip(tmp_path):
    config = _tiny_config()
    trace_set = run_experiment(config, str(tmp_path))
    parsed = read_points(str(tmp_path / "points_de_f3_f1.csv"))
    assert set(parsed) == set(trace_set.traces)
    for key, (best, coords) in parsed.items():
        trace = trace_set.traces[key]
        assert best == trace.final_best
        assert np.array_equal(np.asarray(coords), trace.final_best_point)


def test_corrupted_trace_row_names_file_and_line(tmp_path):
    path = tmp_path / "trace_bad_f1_f1.csv"
    path.write_text(
        "alg,f_first,f_second,alpha,instance,run,evals,best\n"
        "de,1,1,0.000000,1,0,1,3.5\n"
        "de,1,1,0.000000,1,0,not_a_number,3.1\n"
    )
    with pytest.raises(TraceFormatError) as err:
        read_trace_events(str(path))
    assert "trace_bad_f1_f1.csv:3" in str(err.value)


def test_incomplete_marker_removed_only_on_success(tmp_path):
    config = _tiny_config()
    traces = execute_grid(config)
    write_trace_files(config, traces, str(tmp_path))
    assert not (tmp_path / "_INCOMPLETE").exists()
    missing_key = dict(traces)
    missing_key.pop(next(iter(missing_key)))
    with pytest.raises(KeyError):
        write_trace_files(config, missing_key, str(tmp_path / "broken"))
    assert (tmp_path / "broken" / "_INCOMPLETE").exists()


def test_load_config_round_trip(tmp_path):
    toml_text = """
pairs = [[3, 1], [21, 9]]
alphas = [0.0, 0.5, 1.0]
instances_first = [1, 2]
instance_second = 2
runs_per_instance = 3
dimension = 4
budget_multiplier = 500
master_seed = 1234

[[algorithms]]
name = "dcma"
sigma0 = 2.0
label = "dcma2"

[[algorithms]]
name = "de"
population_size = 16

[placement_policy.21]
mode = "fixed_norm"
norm = 1.0
"""
    path = tmp_path / "exp.toml"
    path.write_text(toml_text)
    config = load_config(str(path))
    assert config.pairs == ((3, 1), (21, 9))
    assert config.alphas == (0.0, 0.5, 1.0)
    assert config.instances_first == (1, 2)
    assert config.instance_second == 2
    assert config.runs_per_instance == 3
    assert config.dimension == 4
    assert config.budget == 2000
    assert config.master_seed == 1234
    assert config.algorithms[0].key == "dcma2"
    assert config.algorithms[0].sigma0 == 2.0
    assert config.algorithms[1].population_size == 16
    assert config.policy_for(21) == PlacementPolicy(mode="fixed_norm", norm=1.0)


def test_config_from_dict_rejects_unknowns_and_bad_types():
    valid = {
        "pairs": [[3, 1]],
        "algorithms": [{"name": "de"}],
    }
    config_from_dict(valid)
    with pytest.raises(ConfigError):
        config_from_dict({**valid, "buget_multiplier": 10})
    with pytest.raises(ConfigError):
        config_from_dict({**valid, "alphas": ["0.5"]})
    with pytest.raises(ConfigError):
        config_from_dict({**valid, "pairs": [[3, 1, 2]]})
    with pytest.raises(ConfigError):
        config_from_dict({**valid, "algorithms": [{"name": "de", "speed": 9}]})
    with pytest.raises(ConfigError):
        config_from_dict({**valid, "dimension": "five"})
    with pytest.raises(ConfigError):
        config_from_dict({"algorithms": [{"name": "de"}]})
    with pytest.raises(ConfigError):
        config_from_dict({**valid, "placement_policy": {"x": {"mode": "uniform"}}})


def test_load_config_rejects_bad_toml(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("pairs = [[3, 1]\n")
    with pytest.raises(ConfigError):
        load_config(str(path))

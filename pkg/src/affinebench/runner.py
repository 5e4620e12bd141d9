"""Experiment expansion, seeded execution, and trace persistence.

An ExperimentConfig names a full (algorithm x pair x alpha x instance x run)
grid.  Every cell's seed derives from its grid coordinates, never from
execution order, so results are identical for any worker count and any
scheduling.  Traces land in one CSV per (algorithm, pair); a companion points
CSV keeps the best point of each run for landscape overlays.
"""

from __future__ import annotations

import csv
import datetime
import functools
import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from . import __version__
from .combine import CombinedProblem, combine
from .optim import AlgorithmConfig, RunTrace, run_algorithm
from .rng import MASK64, mix64
from .suite import MANDATORY_FUNCTIONS, PlacementPolicy, ProblemId, make_problem

DEFAULT_ALPHAS = tuple(i / 20 for i in range(21))
DEFAULT_INSTANCES = (1, 2, 3, 4, 5)

# 16-bit mixing constants from the seed-derivation scheme, each extended to
# 64 bits by tiling the pattern four times.
_ALG_C = 0x9E379E379E379E37
_PAIR_C = 0x85EB85EB85EB85EB
_ALPHA_C = 0xC2B2C2B2C2B2C2B2
_INST_C = 0x27D427D427D427D4
_RUN_C = 0x1657165716571657

TraceKey = tuple[str, tuple[int, int], float, int, int]


class ConfigError(ValueError):
    """Invalid experiment configuration; rejected before any run starts."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative experiment description; budget = budget_multiplier x D."""

    pairs: tuple[tuple[int, int], ...]
    algorithms: tuple[AlgorithmConfig, ...]
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    instances_first: tuple[int, ...] = DEFAULT_INSTANCES
    instance_second: int = 1
    runs_per_instance: int = 5
    dimension: int = 5
    budget_multiplier: int = 2000
    master_seed: int = 0
    placement_policy: dict[int, PlacementPolicy] = field(default_factory=dict)

    def __post_init__(self):
        if not self.pairs:
            raise ConfigError("pairs must be nonempty")
        if len(set(self.pairs)) != len(self.pairs):
            raise ConfigError("duplicate function pairs")
        for pair in self.pairs:
            for fid in pair:
                if fid not in MANDATORY_FUNCTIONS:
                    raise ConfigError(f"unsupported function id {fid} in pairs")
        if not self.algorithms:
            raise ConfigError("algorithms must be nonempty")
        keys = [a.key for a in self.algorithms]
        if len(set(keys)) != len(keys):
            raise ConfigError(f"duplicate algorithm labels: {keys}")
        for key in keys:
            if not key.replace("_", "").replace("-", "").isalnum():
                raise ConfigError(f"algorithm label {key!r} is not filename-safe")
        if not self.alphas:
            raise ConfigError("alphas must be nonempty")
        if len(set(self.alphas)) != len(self.alphas):
            raise ConfigError("duplicate alpha values")
        for a in self.alphas:
            if not 0.0 <= a <= 1.0:
                raise ConfigError(f"alpha {a} outside [0, 1]")
        if not self.instances_first:
            raise ConfigError("instances_first must be nonempty")
        if len(set(self.instances_first)) != len(self.instances_first):
            raise ConfigError("duplicate instances")
        for i in self.instances_first:
            if i < 1:
                raise ConfigError(f"instance id {i} must be >= 1")
        if self.instance_second < 1:
            raise ConfigError("instance_second must be >= 1")
        if self.runs_per_instance < 1:
            raise ConfigError("runs_per_instance must be >= 1")
        if self.dimension < 2:
            raise ConfigError("dimension must be >= 2")
        if self.budget_multiplier < 1:
            raise ConfigError("budget_multiplier must be >= 1")
        for fid in self.placement_policy:
            if fid not in MANDATORY_FUNCTIONS:
                raise ConfigError(f"placement_policy names unknown function {fid}")

    @property
    def budget(self) -> int:
        return self.budget_multiplier * self.dimension

    def policy_for(self, function_id: int) -> PlacementPolicy:
        return self.placement_policy.get(function_id, PlacementPolicy())


@dataclass(frozen=True)
class TraceSet:
    """All traces of one experiment keyed by grid coordinates."""

    metadata: dict
    traces: dict[TraceKey, RunTrace]


def derive_seed(
    master: int,
    alg_index: int,
    pair_index: int,
    alpha_index: int,
    instance: int,
    run_index: int,
) -> int:
    """Position-derived 64-bit run seed; independent of execution order."""
    blend = (
        alg_index * _ALG_C
        + pair_index * _PAIR_C
        + alpha_index * _ALPHA_C
        + instance * _INST_C
        + run_index * _RUN_C
    ) & MASK64
    return mix64((master & MASK64) ^ blend)


@functools.lru_cache(maxsize=None)
def _cached_problem(fid: int, iid: int, dim: int, policy: PlacementPolicy):
    return make_problem(ProblemId(fid, iid, dim), policy)


def _cell_problem(
    config: ExperimentConfig, pair: tuple[int, int], alpha: float, instance: int
) -> CombinedProblem:
    first = _cached_problem(pair[0], instance, config.dimension, config.policy_for(pair[0]))
    second = _cached_problem(
        pair[1], config.instance_second, config.dimension, config.policy_for(pair[1])
    )
    return combine(first, second, alpha)


def _run_cell(config: ExperimentConfig, coords: tuple[int, int, int, int, int]):
    ai, pi, li, ii, ri = coords
    algorithm = config.algorithms[ai]
    pair = config.pairs[pi]
    alpha = config.alphas[li]
    instance = config.instances_first[ii]
    problem = _cell_problem(config, pair, alpha, instance)
    seed = derive_seed(config.master_seed, ai, pi, li, instance, ri)
    trace = run_algorithm(algorithm, problem, config.budget, seed)
    key: TraceKey = (algorithm.key, pair, alpha, instance, ri)
    return key, trace


def execute_grid(config: ExperimentConfig, workers: int = 1) -> dict[TraceKey, RunTrace]:
    """Run every grid cell; results keyed by coordinates, order-independent."""
    coords = list(
        itertools.product(
            range(len(config.algorithms)),
            range(len(config.pairs)),
            range(len(config.alphas)),
            range(len(config.instances_first)),
            range(config.runs_per_instance),
        )
    )
    traces: dict[TraceKey, RunTrace] = {}
    if workers <= 1:
        for c in coords:
            key, trace = _run_cell(config, c)
            traces[key] = trace
    else:
        job = functools.partial(_run_cell, config)
        chunk = max(1, len(coords) // (8 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for key, trace in pool.map(job, coords, chunksize=chunk):
                traces[key] = trace
    return traces


def _fmt(value: float) -> str:
    return format(value, ".17g")


def _trace_filename(alg_key: str, pair: tuple[int, int]) -> str:
    return f"trace_{alg_key}_f{pair[0]}_f{pair[1]}.csv"


def _points_filename(alg_key: str, pair: tuple[int, int]) -> str:
    return f"points_{alg_key}_f{pair[0]}_f{pair[1]}.csv"


def write_trace_files(config: ExperimentConfig, traces: dict[TraceKey, RunTrace], out_dir: str) -> list[str]:
    """Persist traces: one trace CSV and one best-point CSV per
    (algorithm, pair), plus a manifest echoing the config.

    Rows are ordered by the config's grid order, so files are byte-identical
    across reruns and worker counts apart from the timestamp comment line.
    """
    os.makedirs(out_dir, exist_ok=True)
    marker = os.path.join(out_dir, "_INCOMPLETE")
    with open(marker, "w") as fh:
        fh.write("experiment output incomplete\n")
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    written: list[str] = []
    try:
        for algorithm in config.algorithms:
            for pair in config.pairs:
                trace_path = os.path.join(out_dir, _trace_filename(algorithm.key, pair))
                points_path = os.path.join(out_dir, _points_filename(algorithm.key, pair))
                with open(trace_path, "w", newline="") as tf, open(
                    points_path, "w", newline=""
                ) as pf:
                    tf.write(f"# generated: {stamp}\n")
                    pf.write(f"# generated: {stamp}\n")
                    tf.write("alg,f_first,f_second,alpha,instance,run,evals,best\n")
                    pf.write("alg,f_first,f_second,alpha,instance,run,best,point\n")
                    for alpha in config.alphas:
                        for instance in config.instances_first:
                            for run in range(config.runs_per_instance):
                                key = (algorithm.key, pair, alpha, instance, run)
                                trace = traces[key]
                                prefix = (
                                    f"{algorithm.key},{pair[0]},{pair[1]},"
                                    f"{alpha:.6f},{instance},{run}"
                                )
                                for evals, best in trace.events:
                                    tf.write(f"{prefix},{evals},{_fmt(best)}\n")
                                point = " ".join(_fmt(v) for v in trace.final_best_point)
                                pf.write(f"{prefix},{_fmt(trace.final_best)},{point}\n")
                written.append(trace_path)
                written.append(points_path)
        manifest = {
            "version": __version__,
            "budget": config.budget,
            "dimension": config.dimension,
            "runs_per_instance": config.runs_per_instance,
            "master_seed": config.master_seed,
            "pairs": [list(p) for p in config.pairs],
            "alphas": [f"{a:.6f}" for a in config.alphas],
            "instances_first": list(config.instances_first),
            "instance_second": config.instance_second,
            "algorithms": [a.key for a in config.algorithms],
        }
        manifest_path = os.path.join(out_dir, "manifest.json")
        with open(manifest_path, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(manifest_path)
    except OSError:
        raise
    else:
        os.remove(marker)
    return written


def run_experiment(config: ExperimentConfig, out_dir: str, workers: int = 1) -> TraceSet:
    """Execute the full grid and persist all outputs under ``out_dir``."""
    traces = execute_grid(config, workers=workers)
    write_trace_files(config, traces, out_dir)
    metadata = {"version": __version__, "budget": config.budget, "config": config}
    return TraceSet(metadata=metadata, traces=traces)


def _require(table: dict, key: str, kind, where: str):
    if key not in table:
        raise ConfigError(f"missing key {key!r} in {where}")
    value = table[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise ConfigError(f"key {key!r} in {where} must be {kind}, got {type(value)}")
    return value


def _algorithm_from_table(table: dict, index: int) -> AlgorithmConfig:
    where = f"algorithms[{index}]"
    if not isinstance(table, dict):
        raise ConfigError(f"{where} must be a table")
    known = {
        "name",
        "population_size",
        "sigma0",
        "init",
        "label",
        "de_weight",
        "de_crossover",
        "pso_inertia",
        "pso_cognitive",
        "pso_social",
        "emna_selection",
    }
    unknown = set(table) - known
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in {where}")
    name = _require(table, "name", str, where)
    kwargs = {k: table[k] for k in table if k != "name"}
    for fkey in ("sigma0", "de_weight", "de_crossover", "pso_inertia", "pso_cognitive", "pso_social", "emna_selection"):
        if fkey in kwargs:
            kwargs[fkey] = float(kwargs[fkey])
    try:
        return AlgorithmConfig(name=name, **kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build and validate an ExperimentConfig from parsed TOML data."""
    known = {
        "pairs",
        "alphas",
        "instances_first",
        "instance_second",
        "runs_per_instance",
        "dimension",
        "budget_multiplier",
        "algorithms",
        "master_seed",
        "placement_policy",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    pairs_raw = _require(raw, "pairs", list, "config")
    pairs = []
    for entry in pairs_raw:
        if not (isinstance(entry, list) and len(entry) == 2 and all(isinstance(v, int) for v in entry)):
            raise ConfigError(f"each pair must be a two-integer array, got {entry!r}")
        pairs.append((entry[0], entry[1]))

    algs_raw = _require(raw, "algorithms", list, "config")
    algorithms = tuple(_algorithm_from_table(t, i) for i, t in enumerate(algs_raw))

    kwargs: dict = {"pairs": tuple(pairs), "algorithms": algorithms}
    if "alphas" in raw:
        alphas = raw["alphas"]
        if not isinstance(alphas, list) or not all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in alphas):
            raise ConfigError("alphas must be an array of reals")
        kwargs["alphas"] = tuple(float(a) for a in alphas)
    if "instances_first" in raw:
        inst = raw["instances_first"]
        if not isinstance(inst, list) or not all(isinstance(i, int) for i in inst):
            raise ConfigError("instances_first must be an array of integers")
        kwargs["instances_first"] = tuple(inst)
    for key in ("instance_second", "runs_per_instance", "dimension", "budget_multiplier", "master_seed"):
        if key in raw:
            if not isinstance(raw[key], int) or isinstance(raw[key], bool):
                raise ConfigError(f"{key} must be an integer")
            kwargs[key] = raw[key]
    if "placement_policy" in raw:
        table = raw["placement_policy"]
        if not isinstance(table, dict):
            raise ConfigError("placement_policy must be a table keyed by function id")
        policies = {}
        for fid_str, sub in table.items():
            try:
                fid = int(fid_str)
            except ValueError:
                raise ConfigError(f"placement_policy key {fid_str!r} is not a function id")
            if not isinstance(sub, dict):
                raise ConfigError(f"placement_policy.{fid_str} must be a table")
            mode = sub.get("mode", "uniform")
            norm = sub.get("norm", 1.0)
            try:
                policies[fid] = PlacementPolicy(mode=mode, norm=float(norm))
            except ValueError as exc:
                raise ConfigError(f"placement_policy.{fid_str}: {exc}") from exc
        kwargs["placement_policy"] = policies
    try:
        return ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> ExperimentConfig:
    """Parse a TOML experiment file into a validated ExperimentConfig."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    return config_from_dict(raw)


def read_trace_events(path: str) -> dict[TraceKey, list[tuple[int, float]]]:
    """Parse one trace CSV back into per-run event lists.

    Raises TraceFormatError naming the file and line on any malformed row.
    """
    events: dict[TraceKey, list[tuple[int, float]]] = {}
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        header_seen = False
        for lineno, row in enumerate(reader, start=1):
            if not row or row[0].startswith("#"):
                continue
            if not header_seen:
                if row != ["alg", "f_first", "f_second", "alpha", "instance", "run", "evals", "best"]:
                    raise TraceFormatError(path, lineno, f"unexpected header {row}")
                header_seen = True
                continue
            if len(row) != 8:
                raise TraceFormatError(path, lineno, f"expected 8 fields, got {len(row)}")
            try:
                key: TraceKey = (
                    row[0],
                    (int(row[1]), int(row[2])),
                    float(row[3]),
                    int(row[4]),
                    int(row[5]),
                )
                evals = int(row[6])
                best = float(row[7])
            except ValueError as exc:
                raise TraceFormatError(path, lineno, str(exc)) from exc
            events.setdefault(key, []).append((evals, best))
        if not header_seen:
            raise TraceFormatError(path, 1, "missing header")
    return events


def read_points(path: str) -> dict[TraceKey, tuple[float, list[float]]]:
    """Parse one points CSV into (final_best, final_best_point) per run."""
    points: dict[TraceKey, tuple[float, list[float]]] = {}
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        header_seen = False
        for lineno, row in enumerate(reader, start=1):
            if not row or row[0].startswith("#"):
                continue
            if not header_seen:
                if row != ["alg", "f_first", "f_second", "alpha", "instance", "run", "best", "point"]:
                    raise TraceFormatError(path, lineno, f"unexpected header {row}")
                header_seen = True
                continue
            if len(row) != 8:
                raise TraceFormatError(path, lineno, f"expected 8 fields, got {len(row)}")
            try:
                key: TraceKey = (
                    row[0],
                    (int(row[1]), int(row[2])),
                    float(row[3]),
                    int(row[4]),
                    int(row[5]),
                )
                best = float(row[6])
                coords = [float(v) for v in row[7].split()]
            except ValueError as exc:
                raise TraceFormatError(path, lineno, str(exc)) from exc
            points[key] = (best, coords)
        if not header_seen:
            raise TraceFormatError(path, 1, "missing header")
    return points


class TraceFormatError(ValueError):
    def __init__(self, path: str, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


def read_manifest(traces_dir: str) -> dict | None:
    path = os.path.join(traces_dir, "manifest.json")
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        return json.load(fh)

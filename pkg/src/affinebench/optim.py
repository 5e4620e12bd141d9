"""Derivative-free optimizer portfolio with improvement-event traces.

Five minimizers sharing one contract: consume exactly ``budget`` objective
evaluations, record every strict improvement of the best-so-far value as an
(evaluation count, value) event, and replay bit-identically for the same
(config, problem, seed).  Points outside [-5, 5]^D are evaluated as-is; no
repair is applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ALGORITHM_NAMES = ("de", "pso", "emna", "dcma", "nelder_mead")

_DEFAULT_POPSIZE = {"de": 30, "pso": 40, "emna": 80}
_DEFAULT_INIT = {
    "de": "uniform",
    "pso": "uniform",
    "emna": "origin_gaussian",
    "dcma": "origin_gaussian",
    "nelder_mead": "origin_gaussian",
}

_LOW, _HIGH = -5.0, 5.0


@dataclass(frozen=True)
class AlgorithmConfig:
    """Portfolio member configuration.

    ``population_size`` of None means the algorithm default; dcma derives its
    population from the dimension and nelder_mead has none.  ``init`` of None
    means the algorithm default (uniform for de/pso, origin-centered Gaussian
    otherwise).  ``label`` names the algorithm in trace keys and file names,
    so two differently tuned copies of one method can share an experiment.
    """

    name: str
    population_size: int | None = None
    sigma0: float = 0.3
    init: str | None = None
    label: str | None = None
    de_weight: float = 0.5
    de_crossover: float = 0.9
    pso_inertia: float = 0.729
    pso_cognitive: float = 1.49
    pso_social: float = 1.49
    emna_selection: float = 0.25

    def __post_init__(self):
        if self.name not in ALGORITHM_NAMES:
            raise ValueError(
                f"unknown algorithm {self.name!r} (choose from {ALGORITHM_NAMES})"
            )
        if self.sigma0 <= 0.0:
            raise ValueError(f"sigma0 must be positive, got {self.sigma0}")
        if self.init not in (None, "origin_gaussian", "uniform"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.population_size is not None:
            minimum = 4 if self.name == "de" else 2
            if self.population_size < minimum:
                raise ValueError(
                    f"{self.name} needs population_size >= {minimum}, "
                    f"got {self.population_size}"
                )

    @property
    def key(self) -> str:
        return self.label or self.name

    def resolved_population(self, dim: int) -> int:
        if self.name == "dcma":
            return 4 + int(3 * math.log(dim))
        if self.name == "nelder_mead":
            return dim + 1
        return self.population_size or _DEFAULT_POPSIZE[self.name]

    def resolved_init(self) -> str:
        return self.init or _DEFAULT_INIT[self.name]


@dataclass(frozen=True)
class RunTrace:
    """Improvement events of one run: strictly increasing evaluation counts,
    strictly decreasing best values, first event at evaluation 1."""

    events: tuple[tuple[int, float], ...]
    budget: int
    final_best: float
    final_best_point: np.ndarray

    def best_at(self, evaluations: int) -> float:
        """Best-so-far after ``evaluations`` objective calls."""
        best = math.inf
        for used, value in self.events:
            if used > evaluations:
                break
            best = value
        return best


class _OutOfBudget(Exception):
    pass


class _Run:
    """Budget accounting plus improvement recording around a problem."""

    def __init__(self, problem, budget: int):
        self.problem = problem
        self.budget = budget
        self.used = 0
        self.best = math.inf
        self.best_point: np.ndarray | None = None
        self.events: list[tuple[int, float]] = []

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate a batch in order, stopping at the budget boundary.

        Raises _OutOfBudget once the budget is exhausted, after recording the
        evaluations that did fit; callers abandon the partial generation.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        remaining = self.budget - self.used
        if remaining <= 0:
            raise _OutOfBudget
        batch = pts[: min(len(pts), remaining)]
        values = np.atleast_1d(self.problem.evaluate(batch))
        for i, value in enumerate(values):
            if value < self.best:
                self.best = float(value)
                self.best_point = batch[i].copy()
                self.events.append((self.used + i + 1, float(value)))
        self.used += len(batch)
        if len(batch) < len(pts):
            raise _OutOfBudget
        return values

    def evaluate_one(self, point: np.ndarray) -> float:
        return float(self.evaluate(point[None, :])[0])

    def trace(self) -> RunTrace:
        assert self.best_point is not None, "no evaluation was recorded"
        return RunTrace(
            events=tuple(self.events),
            budget=self.budget,
            final_best=self.best,
            final_best_point=self.best_point,
        )


def run_algorithm(config: AlgorithmConfig, problem, budget: int, seed: int) -> RunTrace:
    """Run one optimizer on ``problem`` for exactly ``budget`` evaluations."""
    if budget < 1:
        raise ValueError(f"budget must be positive, got {budget}")
    dim = problem.dimension
    popsize = config.resolved_population(dim)
    if config.name in ("de", "pso", "emna") and budget < popsize:
        raise ValueError(
            f"{config.name} needs budget >= population size {popsize}, got {budget}"
        )
    rng = np.random.default_rng(seed)
    run = _Run(problem, budget)
    driver = _DRIVERS[config.name]
    try:
        driver(config, run, rng, dim, popsize)
    except _OutOfBudget:
        pass
    return run.trace()


def _init_population(config: AlgorithmConfig, rng, size: int, dim: int) -> np.ndarray:
    if config.resolved_init() == "uniform":
        return rng.uniform(_LOW, _HIGH, size=(size, dim))
    return 2.5 * rng.standard_normal((size, dim))


def _run_de(config, run, rng, dim, popsize):
    """rand/1/bin differential evolution."""
    f, cr = config.de_weight, config.de_crossover
    pop = _init_population(config, rng, popsize, dim)
    fit = run.evaluate(pop)
    while True:
        trials = np.empty_like(pop)
        for i in range(popsize):
            picks = rng.choice(popsize - 1, size=3, replace=False)
            picks[picks >= i] += 1
            r1, r2, r3 = pop[picks]
            cross = rng.random(dim) < cr
            cross[rng.integers(dim)] = True
            trials[i] = np.where(cross, r1 + f * (r2 - r3), pop[i])
        trial_fit = run.evaluate(trials)
        better = trial_fit <= fit
        pop[better] = trials[better]
        fit[better] = trial_fit[better]


def _run_pso(config, run, rng, dim, popsize):
    """Global-best PSO; velocities start at zero and clamp to half the range."""
    vmax = 0.5 * (_HIGH - _LOW)
    pos = _init_population(config, rng, popsize, dim)
    vel = np.zeros_like(pos)
    fit = run.evaluate(pos)
    pbest, pbest_fit = pos.copy(), fit.copy()
    g = int(np.argmin(fit))
    gbest, gbest_fit = pos[g].copy(), float(fit[g])
    while True:
        r1 = rng.random((popsize, dim))
        r2 = rng.random((popsize, dim))
        vel = (
            config.pso_inertia * vel
            + config.pso_cognitive * r1 * (pbest - pos)
            + config.pso_social * r2 * (gbest - pos)
        )
        np.clip(vel, -vmax, vmax, out=vel)
        pos = pos + vel
        fit = run.evaluate(pos)
        improved = fit < pbest_fit
        pbest[improved] = pos[improved]
        pbest_fit[improved] = fit[improved]
        g = int(np.argmin(pbest_fit))
        if pbest_fit[g] < gbest_fit:
            gbest, gbest_fit = pbest[g].copy(), float(pbest_fit[g])


def _run_emna(config, run, rng, dim, popsize):
    """Estimate a full-covariance Gaussian from the best quarter each step."""
    mean = np.zeros(dim)
    cov = 2.5**2 * np.eye(dim)
    n_select = max(2, int(popsize * config.emna_selection))
    while True:
        chol = _safe_cholesky(cov)
        sample = mean + rng.standard_normal((popsize, dim)) @ chol.T
        fit = run.evaluate(sample)
        order = np.argsort(fit, kind="stable")[:n_select]
        elite = sample[order]
        mean = elite.mean(axis=0)
        centered = elite - mean
        cov = centered.T @ centered / n_select + 1e-10 * np.eye(dim)


def _safe_cholesky(cov: np.ndarray) -> np.ndarray:
    jitter = 0.0
    for _ in range(60):
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(len(cov)))
        except np.linalg.LinAlgError:
            jitter = max(jitter * 10.0, 1e-12)
    raise np.linalg.LinAlgError("covariance stayed indefinite under jitter")


def _run_dcma(config, run, rng, dim, popsize):
    """(mu/mu_w, lambda)-ES with diagonal covariance and cumulative step-size
    adaptation; learning rates carry the separable (D+2)/3 boost."""
    lam = popsize
    mu = lam // 2
    weights = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    weights /= weights.sum()
    mueff = 1.0 / np.sum(weights**2)

    cs = (mueff + 2.0) / (dim + mueff + 5.0)
    ds = 1.0 + 2.0 * max(0.0, math.sqrt((mueff - 1.0) / (dim + 1.0)) - 1.0) + cs
    cc = (4.0 + mueff / dim) / (dim + 4.0 + 2.0 * mueff / dim)
    c1 = 2.0 / ((dim + 1.3) ** 2 + mueff)
    cmu = min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((dim + 2.0) ** 2 + mueff))
    boost = (dim + 2.0) / 3.0
    c1 = min(1.0, c1 * boost)
    cmu = min(1.0 - c1, cmu * boost)
    chi_n = math.sqrt(dim) * (1.0 - 1.0 / (4.0 * dim) + 1.0 / (21.0 * dim**2))

    if config.resolved_init() == "uniform":
        mean = rng.uniform(_LOW, _HIGH, size=dim)
    else:
        mean = np.zeros(dim)
    sigma = config.sigma0
    variances = np.ones(dim)
    ps = np.zeros(dim)
    pc = np.zeros(dim)
    gen = 0
    while True:
        z = rng.standard_normal((lam, dim))
        y = np.sqrt(variances) * z
        fit = run.evaluate(mean + sigma * y)
        order = np.argsort(fit, kind="stable")[:mu]
        y_w = weights @ y[order]
        z_w = weights @ z[order]

        gen += 1
        ps = (1.0 - cs) * ps + math.sqrt(cs * (2.0 - cs) * mueff) * z_w
        ps_norm = float(np.linalg.norm(ps))
        hsig = ps_norm / math.sqrt(1.0 - (1.0 - cs) ** (2 * gen)) / chi_n < 1.4 + 2.0 / (
            dim + 1.0
        )
        pc = (1.0 - cc) * pc + hsig * math.sqrt(cc * (2.0 - cc) * mueff) * y_w
        rank_mu = weights @ (y[order] ** 2)
        variances = (
            (1.0 - c1 - cmu) * variances
            + c1 * (pc**2 + (1.0 - hsig) * cc * (2.0 - cc) * variances)
            + cmu * rank_mu
        )
        np.clip(variances, 1e-300, 1e300, out=variances)
        mean = mean + sigma * y_w
        sigma *= math.exp((cs / ds) * (ps_norm / chi_n - 1.0))
        sigma = min(max(sigma, 1e-300), 1e300)


def _run_nelder_mead(config, run, rng, dim, popsize):
    """Reflection/expansion/contraction/shrink simplex with restarts.

    The first simplex hangs off a Gaussian point near the origin with unit
    edges; when the simplex collapses below diameter 1e-12 the search restarts
    from a fresh uniform point in the domain.
    """
    del popsize

    def build_simplex(origin):
        pts = np.vstack([origin, origin + np.eye(dim)])
        vals = np.array([run.evaluate_one(p) for p in pts])
        return pts, vals

    if config.resolved_init() == "uniform":
        start = rng.uniform(_LOW, _HIGH, size=dim)
    else:
        start = rng.standard_normal(dim)
    while True:
        pts, vals = build_simplex(start)
        while True:
            order = np.argsort(vals, kind="stable")
            pts, vals = pts[order], vals[order]
            if np.max(np.linalg.norm(pts[1:] - pts[0], axis=1)) < 1e-12:
                break
            centroid = pts[:-1].mean(axis=0)
            reflected = centroid + (centroid - pts[-1])
            f_reflected = run.evaluate_one(reflected)
            if f_reflected < vals[0]:
                expanded = centroid + 2.0 * (centroid - pts[-1])
                f_expanded = run.evaluate_one(expanded)
                if f_expanded < f_reflected:
                    pts[-1], vals[-1] = expanded, f_expanded
                else:
                    pts[-1], vals[-1] = reflected, f_reflected
            elif f_reflected < vals[-2]:
                pts[-1], vals[-1] = reflected, f_reflected
            else:
                if f_reflected < vals[-1]:
                    contracted = centroid + 0.5 * (centroid - pts[-1])
                    f_contracted = run.evaluate_one(contracted)
                    accept = f_contracted <= f_reflected
                else:
                    contracted = centroid - 0.5 * (centroid - pts[-1])
                    f_contracted = run.evaluate_one(contracted)
                    accept = f_contracted < vals[-1]
                if accept:
                    pts[-1], vals[-1] = contracted, f_contracted
                else:
                    for i in range(1, dim + 1):
                        pts[i] = pts[0] + 0.5 * (pts[i] - pts[0])
                        vals[i] = run.evaluate_one(pts[i])
        start = rng.uniform(_LOW, _HIGH, size=dim)


_DRIVERS = {
    "de": _run_de,
    "pso": _run_pso,
    "emna": _run_emna,
    "dcma": _run_dcma,
    "nelder_mead": _run_nelder_mead,
}

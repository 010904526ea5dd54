"""Main optimization loop: generate trend-predicted offspring, keep the
non-dominated union, truncate the densest members back to capacity, decay the
bandwidth, repeat until the evaluation budget is spent.

The archive is an ordered list of mutually non-dominated particles; insertion
order is preserved everywhere so runs are reproducible bit for bit.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import metrics, sampling
from .core import (
    EvaluationBudget,
    Particle,
    Problem,
    RandomStream,
    evaluate_batch_counted,
    nondominated_mask,
)
from .tpm import TpmConfig, _unit_rows, tpm_generate

Archive = list[Particle]

# Geometric bandwidth decay underflows float64 to exactly zero after ~7000
# generations; the floor keeps h and h*h positive so every h-dependent
# operation stays well-defined (the KDE ranking is pure nearest-pair
# comparison long before that point).
BANDWIDTH_FLOOR = 1e-150


@dataclass(frozen=True)
class OptimizerConfig:
    """Run parameters; defaults follow the benchmark setup used throughout.

    `archive_capacity` bounds the retained population, `offspring_per_gen` is
    the per-generation sample count (defaults to the capacity when built via
    `with_defaults`), and the bandwidth decays from `h0` by `attenuation` each
    generation.
    """

    archive_capacity: int = 300
    offspring_per_gen: int = 300
    eval_limit: int = 100_000
    attenuation: float = 0.9
    h0: float = 1.0
    seed: int = 0
    step_mode: str = "ceiling"
    kde_space: str = "objective"

    def __post_init__(self):
        if self.archive_capacity < 1:
            raise ValueError("archive capacity must be at least 1")
        if self.offspring_per_gen < 1:
            raise ValueError("offspring per generation must be at least 1")
        if not 0.0 < self.attenuation < 1.0:
            raise ValueError(f"attenuation must lie in (0, 1), got {self.attenuation}")
        if self.eval_limit < self.offspring_per_gen:
            raise ValueError("evaluation limit must cover at least one generation")
        if self.h0 <= 0.0:
            raise ValueError("initial bandwidth must be positive")


@dataclass(frozen=True)
class TraceRow:
    """One completed generation: budget state, bandwidth used, front quality."""

    iteration: int
    evals: int
    h: float
    archive_size: int
    sp: float
    igd: float
    elapsed_ms: float


@dataclass
class RunTrace:
    rows: list[TraceRow] = field(default_factory=list)
    wall_s: float = 0.0
    eval_s: float = 0.0
    evals: int = 0


def initialize(
    problem: Problem, count: int, rng: RandomStream, budget: EvaluationBudget
) -> Archive:
    """Uniform random population with random unit headings, filtered to its
    non-dominated subset.  Consumes exactly `count` evaluations.
    """
    gen = rng.generator
    xs = gen.uniform(problem.bounds.lower, problem.bounds.upper, size=(count, problem.d))
    directions = _unit_rows(gen, count, problem.d)
    objectives = evaluate_batch_counted(problem, xs, budget)
    particles = [
        Particle(solution=xs[i], objectives=objectives[i], direction=directions[i])
        for i in range(len(objectives))
    ]
    return update_archive([], particles)


def update_archive(archive: Sequence[Particle], offspring: Sequence[Particle]) -> Archive:
    """Exactly the non-dominated subset of archive + offspring, earliest first."""
    combined = list(archive) + list(offspring)
    if not combined:
        return []
    mask = nondominated_mask(np.array([p.objectives for p in combined]))
    return [p for p, keep in zip(combined, mask) if keep]


def truncate(archive: Sequence[Particle], capacity: int, h: float, kde_space: str = "objective") -> Archive:
    """Repeatedly drop one densest member (ties: lowest index) until at capacity.

    Densities are recomputed over the survivors after every removal, since a
    removal shifts both its neighbors' densities and the normalization box.
    Ranking goes through the underflow-proof neighbor-mass form of the KDE so
    the comparison stays exact at strongly decayed bandwidths.
    """
    members = list(archive)
    if len(members) <= capacity:
        return members
    if kde_space not in sampling.KDE_SPACES:
        raise ValueError(f"kde space must be one of {sampling.KDE_SPACES}, got {kde_space!r}")
    if kde_space == "objective":
        points = np.array([p.objectives for p in members])
    else:
        points = np.array([p.solution for p in members])
    survivors = sampling.run_truncation(points, h, capacity)
    return [members[i] for i in survivors]


def uniform_generate(
    problem: Problem, count: int, rng: RandomStream, budget: EvaluationBudget
) -> list[Particle]:
    """Budget-matched control generator: uniform random solutions, random headings."""
    count = min(count, budget.remaining)
    if count <= 0:
        return []
    gen = rng.generator
    xs = gen.uniform(problem.bounds.lower, problem.bounds.upper, size=(count, problem.d))
    directions = _unit_rows(gen, count, problem.d)
    objectives = evaluate_batch_counted(problem, xs, budget)
    return [
        Particle(solution=xs[i], objectives=objectives[i], direction=directions[i])
        for i in range(len(objectives))
    ]


def run(
    problem: Problem,
    config: OptimizerConfig,
    reference: np.ndarray | None = None,
    baseline: bool = False,
    clock: Callable[[], float] = time.perf_counter,
    on_iteration: Callable[[int, Archive, float, EvaluationBudget], None] | None = None,
) -> tuple[Archive, RunTrace]:
    """Execute one full run; returns the final archive and its per-iteration trace.

    `baseline` swaps the trend-predicted offspring for uniform random sampling
    while keeping initialization, filtering, truncation, and bandwidth decay
    identical.  `clock` is injectable so traces can be reproduced exactly;
    `on_iteration` observes (iteration, archive, next bandwidth, budget) after
    every completed generation.
    """
    rng = RandomStream(config.seed)
    budget = EvaluationBudget(limit=config.eval_limit)
    start = clock()

    archive = initialize(problem, config.offspring_per_gen, rng, budget)
    trace = RunTrace()
    iteration = 0
    while not budget.exhausted:
        h = max(config.h0 * config.attenuation**iteration, BANDWIDTH_FLOOR)
        if baseline:
            offspring = uniform_generate(problem, config.offspring_per_gen, rng, budget)
        else:
            tpm_config = TpmConfig(
                h=h,
                count=config.offspring_per_gen,
                step_mode=config.step_mode,
                kde_space=config.kde_space,
            )
            offspring = tpm_generate(problem, archive, tpm_config, rng, budget)
        archive = update_archive(archive, offspring)
        archive = truncate(archive, config.archive_capacity, h, config.kde_space)
        iteration += 1

        front = np.array([p.objectives for p in archive])
        sp = metrics.spacing(front) if len(archive) >= 2 else math.nan
        igd = metrics.igd(reference, front) if reference is not None else math.nan
        trace.rows.append(
            TraceRow(
                iteration=iteration,
                evals=budget.used,
                h=h,
                archive_size=len(archive),
                sp=sp,
                igd=igd,
                elapsed_ms=(clock() - start) * 1e3,
            )
        )
        if on_iteration is not None:
            on_iteration(iteration, archive, config.h0 * config.attenuation**iteration, budget)

    trace.wall_s = clock() - start
    trace.eval_s = budget.eval_seconds
    trace.evals = budget.used
    return archive, trace

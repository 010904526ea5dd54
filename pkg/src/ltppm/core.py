"""Shared primitives: particles, Pareto dominance, box bounds, evaluation budgets,
and seeded random streams.

Decision and objective vectors are plain 1-D float ndarrays throughout the
package; the invariants attached to them (dimension, bounds, finiteness) are
enforced by the operations that produce them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

DIRECTION_NORM_TOL = 1e-9


class BudgetExhausted(Exception):
    """Raised when an objective evaluation is requested past the budget limit."""


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BoxBounds:
    """Per-dimension closed intervals [lower_i, upper_i]."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower", _readonly(self.lower))
        object.__setattr__(self, "upper", _readonly(self.upper))
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise ValueError("bounds must be two 1-D arrays of equal length")
        if not (np.isfinite(self.lower).all() and np.isfinite(self.upper).all()):
            raise ValueError("bounds must be finite")
        if np.any(self.lower > self.upper):
            raise ValueError("each lower bound must not exceed its upper bound")

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower


@dataclass(frozen=True, eq=False)
class Particle:
    """A solution paired with the unit direction along which it was spawned.

    Objectives are cached at creation and never re-evaluated; all three arrays
    are frozen so particles can be shared freely.  Equality is identity: an
    archive holds particular individuals, not value classes.
    """

    solution: np.ndarray
    objectives: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "solution", _readonly(self.solution))
        object.__setattr__(self, "objectives", _readonly(self.objectives))
        object.__setattr__(self, "direction", _readonly(self.direction))
        if self.solution.ndim != 1 or self.direction.shape != self.solution.shape:
            raise ValueError("solution and direction must be 1-D arrays of equal length")
        norm = float(np.linalg.norm(self.direction))
        if abs(norm - 1.0) > DIRECTION_NORM_TOL:
            raise ValueError(f"direction must be a unit vector, got norm {norm}")


class Problem(Protocol):
    """Minimization problem over a box-bounded decision space."""

    m: int
    d: int
    bounds: BoxBounds

    def evaluate(self, x: np.ndarray) -> np.ndarray: ...

    def evaluate_batch(self, xs: np.ndarray) -> np.ndarray: ...


def dominates(a, b) -> bool:
    """Pareto dominance for minimization: a is nowhere worse and somewhere better."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"objective vectors differ in shape: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def nondominated_mask(objectives: np.ndarray) -> np.ndarray:
    """Boolean mask of the rows of `objectives` not dominated by any other row."""
    y = np.asarray(objectives, dtype=float)
    if y.ndim != 2:
        raise ValueError("expected a 2-D array of objective vectors")
    # dominated[j, i]: row j dominates row i
    le = np.all(y[:, None, :] <= y[None, :, :], axis=2)
    lt = np.any(y[:, None, :] < y[None, :, :], axis=2)
    return ~np.any(le & lt, axis=0)


def clamp_to_bounds(x: np.ndarray, bounds: BoxBounds) -> np.ndarray:
    """Project each component onto its closed interval; interior points pass through."""
    return np.clip(x, bounds.lower, bounds.upper)


@dataclass
class EvaluationBudget:
    """Counter of objective-function evaluations, one tick per solution.

    `eval_seconds` accumulates wall time spent inside the objective function so
    algorithmic overhead can be reported separately from evaluation cost.
    """

    limit: int
    used: int = 0
    eval_seconds: float = 0.0

    @property
    def remaining(self) -> int:
        return self.limit - self.used

    @property
    def exhausted(self) -> bool:
        return self.used >= self.limit

    def take(self, want: int) -> int:
        """Reserve up to `want` evaluations; returns how many were granted."""
        granted = min(int(want), self.remaining)
        if granted < 0:
            granted = 0
        self.used += granted
        return granted


def evaluate_counted(problem: Problem, x: np.ndarray, budget: EvaluationBudget) -> np.ndarray:
    """Evaluate one solution against the budget; raises BudgetExhausted at the limit."""
    if budget.exhausted:
        raise BudgetExhausted(f"evaluation budget exhausted ({budget.used}/{budget.limit})")
    start = time.perf_counter()
    objectives = problem.evaluate(x)
    budget.eval_seconds += time.perf_counter() - start
    budget.used += 1
    return objectives


def evaluate_batch_counted(
    problem: Problem, xs: np.ndarray, budget: EvaluationBudget
) -> np.ndarray:
    """Evaluate the leading rows of `xs` that fit in the budget (may be none).

    Equivalent to calling `evaluate_counted` row by row until the budget runs
    out, but lets the problem vectorize over the batch.
    """
    xs = np.asarray(xs, dtype=float)
    granted = budget.take(len(xs))
    if granted == 0:
        return np.empty((0, problem.m))
    start = time.perf_counter()
    objectives = problem.evaluate_batch(xs[:granted])
    budget.eval_seconds += time.perf_counter() - start
    return objectives


class RandomStream:
    """Seeded PCG64 stream: equal seeds yield identical draws on every platform.

    Concurrent workers derive private child streams through `spawn`, which uses
    numpy's SeedSequence spawning so children are independent and reproducible
    from the root seed alone.
    """

    def __init__(self, seed: int | None = None, _sequence: np.random.SeedSequence | None = None):
        if _sequence is None:
            _sequence = np.random.SeedSequence(seed)
        self.seed = seed
        self._sequence = _sequence
        self.generator = np.random.Generator(np.random.PCG64(_sequence))

    def spawn(self, count: int) -> list["RandomStream"]:
        return [RandomStream(self.seed, _sequence=child) for child in self._sequence.spawn(count)]

    def unit_vector(self, dim: int) -> np.ndarray:
        """Uniform random point on the unit sphere in `dim` dimensions."""
        while True:
            v = self.generator.standard_normal(dim)
            norm = np.linalg.norm(v)
            if norm > 1e-12:
                return v / norm

"""Trend-guided offspring generation.

New directions are sampled at a Gaussian-distributed angle around the parent's
unit direction: the parent direction is reflected onto the first axis, a
uniform point is drawn on the orthogonal-complement sphere, and the
composition is reflected back.  The reflection is an implicit Householder
transform, applied in O(d) per sample and equal to its own inverse.

Step lengths come from a zero-mean Gaussian whose variance is the bandwidth;
the default step rule scales the magnitude by a tenth of each dimension's
bound width, while the ceiling rule keeps the raw integer-ceiling step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    EvaluationBudget,
    Particle,
    Problem,
    RandomStream,
    evaluate_batch_counted,
)
from .sampling import archive_importance

STEP_MODES = ("continuous", "ceiling")
STEP_SPAN_FRACTION = 0.1


@dataclass(frozen=True)
class TpmConfig:
    """Per-generation knobs: current bandwidth, step rule, offspring count."""

    h: float
    count: int
    step_mode: str = "ceiling"
    kde_space: str = "objective"

    def __post_init__(self):
        if self.h <= 0.0:
            raise ValueError(f"bandwidth must be positive, got {self.h}")
        if self.count < 0:
            raise ValueError(f"offspring count must be non-negative, got {self.count}")
        if self.step_mode not in STEP_MODES:
            raise ValueError(f"step mode must be one of {STEP_MODES}, got {self.step_mode!r}")


class HouseholderRotation:
    """Orthogonal reflection mapping a given unit vector onto the first axis.

    Symmetric and orthogonal, so `apply` is simultaneously the forward map
    (v -> e1) and its inverse (e1 -> v).
    """

    __slots__ = ("dim", "_w", "_scale")

    def __init__(self, v: np.ndarray):
        v = np.asarray(v, dtype=float)
        norm = float(np.linalg.norm(v))
        if v.ndim != 1 or v.size < 1 or abs(norm - 1.0) > 1e-9:
            raise ValueError("rotation requires a unit vector")
        self.dim = v.size
        w = v.copy()
        w[0] -= 1.0
        ww = float(w @ w)
        if ww < 1e-24:
            self._w = None
            self._scale = 0.0
        else:
            self._w = w
            self._scale = 2.0 / ww

    def apply(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self._w is None:
            return y.copy()
        return y - (self._scale * (self._w @ y)) * self._w

    inverse_apply = apply


def rotation_to_axis(v: np.ndarray) -> HouseholderRotation:
    """Orthogonal transform R with R(v) = e1 within 1e-9; R is its own inverse."""
    return HouseholderRotation(v)


def randpick(v: np.ndarray, theta: float, rng: RandomStream) -> np.ndarray:
    """Unit vector at angle |theta| from v, uniform over the admissible cone shell.

    The component orthogonal to v is uniform on the (d-2)-sphere of v's
    orthogonal complement; in d=2 that degenerates to an equiprobable sign, and
    in d=1 the only candidates are +/-v, resolved by the sign of cos(theta).
    """
    v = np.asarray(v, dtype=float)
    d = v.size
    if abs(float(np.linalg.norm(v)) - 1.0) > 1e-9:
        raise ValueError("randpick requires a unit direction vector")
    if d == 1 or math.sin(theta) == 0.0:
        return v.copy() if math.cos(theta) >= 0.0 else -v
    rotation = rotation_to_axis(v)
    w = rng.unit_vector(d - 1)
    z = np.empty(d)
    z[0] = math.cos(theta)
    z[1:] = math.sin(theta) * w
    u = rotation.apply(z)
    return u / float(np.linalg.norm(u))


def _unit_rows(gen: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Uniform points on the unit sphere, one per row; degenerate rows redrawn."""
    rows = gen.standard_normal((count, dim))
    norms = np.linalg.norm(rows, axis=1)
    while np.any(norms < 1e-12):
        bad = norms < 1e-12
        rows[bad] = gen.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(rows, axis=1)
    return rows / norms[:, None]


def tpm_generate(
    problem: Problem,
    archive: Sequence[Particle],
    config: TpmConfig,
    rng: RandomStream,
    budget: EvaluationBudget,
) -> list[Particle]:
    """Generate up to `config.count` offspring, stopping when the budget runs out.

    Per offspring: importance-sample a parent, draw an angle from
    Normal(0, 1/h) and a direction around the parent's heading (the direction
    sampling is the batched form of `randpick`), draw a step length from
    Normal(0, h), move, clamp to bounds, evaluate.  The offspring inherits the
    sampled direction.  Draws happen in a fixed order (parents, angles,
    complement directions, step lengths) and positions are evaluated as one
    counted batch, so a run is reproducible and a short final generation
    simply yields fewer offspring.
    """
    if len(archive) == 0:
        raise ValueError("offspring generation needs a non-empty archive")
    count = min(config.count, budget.remaining)
    if count <= 0:
        return []

    distribution = archive_importance(archive, config.h, config.kde_space)
    gen = rng.generator
    d = problem.d

    parent_idx = gen.choice(distribution.n, size=count, p=distribution.weights)
    thetas = gen.normal(0.0, math.sqrt(1.0 / config.h), size=count)
    complements = _unit_rows(gen, count, d - 1) if d > 1 else None
    lams = gen.normal(0.0, math.sqrt(config.h), size=count)

    parent_x = np.array([archive[i].solution for i in parent_idx])
    parent_v = np.array([archive[i].direction for i in parent_idx])

    if d == 1:
        directions = np.where(np.cos(thetas)[:, None] >= 0.0, parent_v, -parent_v)
    else:
        z = np.empty((count, d))
        z[:, 0] = np.cos(thetas)
        z[:, 1:] = np.sin(thetas)[:, None] * complements
        w = parent_v.copy()
        w[:, 0] -= 1.0
        ww = np.sum(w * w, axis=1)
        identity = ww < 1e-24
        coeff = np.zeros(count)
        np.divide(2.0 * np.sum(w * z, axis=1), ww, out=coeff, where=~identity)
        directions = z - coeff[:, None] * w
        directions /= np.linalg.norm(directions, axis=1)[:, None]

    if config.step_mode == "ceiling":
        steps = np.ceil(lams)[:, None] * directions
    else:
        span_scale = problem.bounds.span * STEP_SPAN_FRACTION
        steps = np.abs(lams)[:, None] * directions * span_scale[None, :]
    solutions = np.clip(parent_x + steps, problem.bounds.lower, problem.bounds.upper)

    objectives = evaluate_batch_counted(problem, solutions, budget)
    return [
        Particle(solution=solutions[i], objectives=objectives[i], direction=directions[i])
        for i in range(len(objectives))
    ]

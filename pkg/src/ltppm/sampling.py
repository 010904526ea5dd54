"""Kernel-density sparseness over an archive and importance sampling of parents.

Densities are Gaussian KDE estimates of the archive's distribution in min-max
normalized objective space (decision space is available behind a switch).
Sparseness is the clamped reciprocal of density, and parents are drawn with
probability proportional to sparseness so isolated regions of the front are
expanded first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Particle, RandomStream

GAUSSIAN_NORM = 1.0 / math.sqrt(2.0 * math.pi)
DENSITY_FLOOR = 1e-12

KDE_SPACES = ("objective", "decision")


def gaussian_kernel(t: np.ndarray) -> np.ndarray:
    return GAUSSIAN_NORM * np.exp(-0.5 * np.square(t))


def minmax_normalize(points: np.ndarray) -> np.ndarray:
    """Scale each column to [0, 1] over the given points; constant columns go to 0."""
    points = np.asarray(points, dtype=float)
    lo = points.min(axis=0)
    span = points.max(axis=0) - lo
    out = np.zeros_like(points)
    live = span > 0.0
    out[:, live] = (points[:, live] - lo[live]) / span[live]
    return out


def _archive_points(archive: Sequence[Particle], space: str) -> np.ndarray:
    if space not in KDE_SPACES:
        raise ValueError(f"kde space must be one of {KDE_SPACES}, got {space!r}")
    if space == "objective":
        return np.array([p.objectives for p in archive])
    return np.array([p.solution for p in archive])


def _normalized_sq_distances(points: np.ndarray, h: float) -> np.ndarray:
    if h <= 0.0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    points = np.asarray(points, dtype=float)
    if points.shape[0] == 0:
        raise ValueError("density needs a non-empty archive")
    z = minmax_normalize(points)
    sq = np.sum(z * z, axis=1)
    return np.maximum(sq[:, None] + sq[None, :] - 2.0 * (z @ z.T), 0.0)


def density_of_points(points: np.ndarray, h: float) -> np.ndarray:
    """Per-point Gaussian KDE over min-max normalized points; all outputs > 0."""
    d2 = _normalized_sq_distances(points, h)
    n = d2.shape[0]
    return gaussian_kernel(np.sqrt(d2) / h).sum(axis=1) / (n * h)


def neighbor_mass(points: np.ndarray, h: float) -> np.ndarray:
    """log of the non-self kernel mass, sum_{i != k} exp(-d_ki^2 / 2h^2), per point.

    The KDE density is (kappa(0) / (n h)) * (1 + exp(neighbor_mass)), so this
    preserves the exact density ordering (and the exact importance weights)
    even at bandwidths where every cross kernel term underflows to zero in
    double precision.  Isolated points in a singleton archive get -inf.
    """
    d2 = _normalized_sq_distances(points, h)
    n = d2.shape[0]
    if n == 1:
        return np.full(1, -np.inf)
    exponents = -d2 / (2.0 * h * h)
    np.fill_diagonal(exponents, -np.inf)
    peak = exponents.max(axis=1)
    with np.errstate(invalid="ignore"):
        mass = peak + np.log(np.exp(exponents - peak[:, None]).sum(axis=1))
    return np.where(np.isfinite(peak), mass, -np.inf)


def density(archive: Sequence[Particle], h: float, space: str = "objective") -> np.ndarray:
    return density_of_points(_archive_points(archive, space), h)


def run_truncation(points: np.ndarray, h: float, capacity: int) -> list[int]:
    """Indices (ascending) surviving repeated removal of the densest point.

    Each removal recomputes the KDE over the current survivors and drops the
    argmax-density member, ties to the lowest index.  The recompute is
    organized incrementally: the exponent matrix is cached and per-row scaled
    kernel sums are downdated by the removed column, with a full rebuild
    whenever a removal touches the min-max normalization envelope or a row's
    scaling peak.  The survivor set matches the direct per-removal recompute.
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if capacity < 0:
        raise ValueError("capacity must be non-negative")
    if n <= capacity:
        return list(range(n))
    if h <= 0.0:
        raise ValueError(f"bandwidth must be positive, got {h}")

    orig = np.arange(n)
    state: dict = {}

    def rebuild() -> None:
        pts = points[orig]
        state["colmin"] = pts.min(axis=0)
        state["colmax"] = pts.max(axis=0)
        span = state["colmax"] - state["colmin"]
        live = span > 0.0
        z = np.zeros_like(pts)
        z[:, live] = (pts[:, live] - state["colmin"][live]) / span[live]
        sq = np.sum(z * z, axis=1)
        d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (z @ z.T), 0.0)
        s = -d2 / (2.0 * h * h)
        np.fill_diagonal(s, -np.inf)
        state["s"] = s
        state["peaks"] = s.max(axis=1)
        state["sums"] = np.exp(s - state["peaks"][:, None]).sum(axis=1)

    rebuild()
    while orig.size > capacity:
        mass = state["peaks"] + np.log(state["sums"])
        kill = int(np.argmax(mass))
        pt = points[orig[kill]]
        on_envelope = bool(np.any((pt == state["colmin"]) | (pt == state["colmax"])))
        orig = np.delete(orig, kill)
        if orig.size <= capacity:
            break
        if on_envelope:
            rebuild()
            continue
        s = state["s"]
        column = np.delete(s[:, kill], kill)
        peaks = np.delete(state["peaks"], kill)
        sums = np.delete(state["sums"], kill)
        s = np.delete(np.delete(s, kill, axis=0), kill, axis=1)
        stale = column >= peaks
        sums[~stale] -= np.exp(column[~stale] - peaks[~stale])
        if np.any(stale):
            rows = np.where(stale)[0]
            peaks[rows] = s[rows].max(axis=1)
            sums[rows] = np.exp(s[rows] - peaks[rows, None]).sum(axis=1)
        state["s"], state["peaks"], state["sums"] = s, peaks, sums
    return orig.tolist()


def density_ranks(archive: Sequence[Particle], h: float, space: str = "objective") -> np.ndarray:
    """Scores whose ordering equals the density ordering at any bandwidth."""
    return neighbor_mass(_archive_points(archive, space), h)


def sparseness(densities: np.ndarray) -> np.ndarray:
    """Reciprocal density, with densities below the floor clamped first."""
    return 1.0 / np.maximum(np.asarray(densities, dtype=float), DENSITY_FLOOR)


@dataclass(frozen=True)
class ImportanceDistribution:
    """Normalized sparseness weights, aligned with archive iteration order."""

    weights: np.ndarray
    n: int
    h: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


def importance_distribution(sparseness_values: np.ndarray, h: float = math.nan) -> ImportanceDistribution:
    s = np.asarray(sparseness_values, dtype=float)
    if s.size == 0:
        raise ValueError("importance distribution needs at least one particle")
    return ImportanceDistribution(weights=s / s.sum(), n=s.size, h=h)


def archive_importance(
    archive: Sequence[Particle], h: float, space: str = "objective"
) -> ImportanceDistribution:
    """Normalized sparseness weights: KDE density -> reciprocal -> normalize.

    Evaluated through the neighbor-mass form, which equals the literal
    density/sparseness pipeline wherever that pipeline is representable but
    stays exact when the cross kernel terms underflow (weights then approach
    uniform, as the true densities are dominated by each point's self term).
    """
    mass = density_ranks(archive, h, space)
    raw = 1.0 / (1.0 + np.exp(mass))
    return importance_distribution(raw, h=h)


def isample(
    archive: Sequence[Particle],
    h: float,
    rng: RandomStream,
    space: str = "objective",
    distribution: ImportanceDistribution | None = None,
) -> tuple[int, np.ndarray, np.ndarray]:
    """Draw one parent by importance; returns (index, solution, direction).

    Within one generation the archive snapshot is fixed, so callers may pass a
    precomputed `distribution` to skip the O(n^2) density pass per draw.
    """
    if distribution is None:
        distribution = archive_importance(archive, h, space)
    idx = int(rng.generator.choice(distribution.n, p=distribution.weights))
    particle = archive[idx]
    return idx, particle.solution, particle.direction

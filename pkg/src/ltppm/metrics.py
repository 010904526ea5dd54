"""Front quality indicators: Schott's spacing (SP) and inverted generational
distance (IGD).  Lower is better for both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class MetricUndefined(ValueError):
    """Raised when a metric's input is too small for the metric to exist."""


def _as_front(points, name: str) -> np.ndarray:
    f = np.asarray(points, dtype=float)
    if f.ndim == 1:
        f = f[None, :]
    if f.ndim != 2 or f.size == 0:
        raise MetricUndefined(f"{name} must be a non-empty set of objective vectors")
    return f


def spacing(front) -> float:
    """Uniformity of the obtained front: standard deviation (n-1 normalized) of
    nearest-neighbor distances within the set.  Needs at least two points.
    """
    f = _as_front(front, "front")
    if f.shape[0] < 2:
        raise MetricUndefined("spacing needs at least two points")
    diff = f[:, None, :] - f[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    np.fill_diagonal(dist, np.inf)
    nearest = dist.min(axis=1)
    return float(np.sqrt(np.sum((nearest - nearest.mean()) ** 2) / (f.shape[0] - 1)))


def igd(reference, front, squared: bool = False) -> float:
    """Mean distance from each reference point to its closest obtained point.

    `squared` switches to squared Euclidean distances; the default is the
    plain Euclidean form.
    """
    ref = _as_front(reference, "reference")
    f = _as_front(front, "front")
    if ref.shape[1] != f.shape[1]:
        raise ValueError(f"objective counts differ: {ref.shape[1]} vs {f.shape[1]}")
    # Plain differences (not the Gram expansion) keep full precision; chunking
    # caps the temporary at ~a few MB for large reference fronts.
    chunk = max(1, 2_000_000 // max(1, f.shape[0] * f.shape[1]))
    mins = np.empty(ref.shape[0])
    for start in range(0, ref.shape[0], chunk):
        block = ref[start:start + chunk]
        diff = block[:, None, :] - f[None, :, :]
        mins[start:start + chunk] = np.sum(diff * diff, axis=2).min(axis=1)
    if not squared:
        mins = np.sqrt(mins)
    return float(mins.mean())


@dataclass(frozen=True)
class MetricReport:
    sp: float
    igd: float
    front_size: int
    reference_size: int


def report(reference, front, squared: bool = False) -> MetricReport:
    ref = _as_front(reference, "reference")
    f = _as_front(front, "front")
    return MetricReport(
        sp=spacing(f),
        igd=igd(ref, f, squared=squared),
        front_size=f.shape[0],
        reference_size=ref.shape[0],
    )

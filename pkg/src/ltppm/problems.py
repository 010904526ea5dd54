"""Scalable LSMOP1-LSMOP9 benchmark problems with analytic reference fronts.

Each problem splits the decision vector into m-1 position variables in [0, 1]
and d-m+1 distance variables in [0, 10].  Distance variables pass through a
variable-linkage transform tied to the first position variable, are grouped
per objective by a chaos-based non-uniform partition, and feed one of six
landscape functions.  The composed objectives trace a linear, spherical, or
disconnected Pareto front.  Every constant of the construction is pinned in
PROBLEMS.md at the repository root.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import BoxBounds

N_SUBCOMPONENTS = 5
POSITION_BOUND = 1.0
DISTANCE_BOUND = 10.0

# Endpoints of the disconnected regions traced by each position coordinate of
# the lsmop9 front (shared by the whole DTLZ7-style family).
DISCONNECTED_INTERVALS = ((0.0, 0.251412), (0.631627, 0.859401))


def _sphere(z: np.ndarray) -> np.ndarray:
    return np.sum(z * z, axis=1)


def _schwefel(z: np.ndarray) -> np.ndarray:
    return np.max(np.abs(z), axis=1)


def _rosenbrock(z: np.ndarray) -> np.ndarray:
    if z.shape[1] < 2:
        return np.zeros(z.shape[0])
    return np.sum(100.0 * (z[:, :-1] ** 2 - z[:, 1:]) ** 2 + (z[:, :-1] - 1.0) ** 2, axis=1)


def _rastrigin(z: np.ndarray) -> np.ndarray:
    return np.sum(z * z - 10.0 * np.cos(2.0 * np.pi * z) + 10.0, axis=1)


def _griewank(z: np.ndarray) -> np.ndarray:
    idx = np.arange(1, z.shape[1] + 1, dtype=float)
    return np.sum(z * z, axis=1) / 4000.0 - np.prod(np.cos(z / np.sqrt(idx)), axis=1) + 1.0


def _ackley(z: np.ndarray) -> np.ndarray:
    k = z.shape[1]
    return (
        20.0
        - 20.0 * np.exp(-0.2 * np.sqrt(np.sum(z * z, axis=1) / k))
        - np.exp(np.sum(np.cos(2.0 * np.pi * z), axis=1) / k)
        + math.e
    )


# Landscape pair (odd-numbered groups, even-numbered groups) per problem id.
_LANDSCAPES = {
    1: (_sphere, _sphere),
    2: (_griewank, _schwefel),
    3: (_rastrigin, _rosenbrock),
    4: (_ackley, _griewank),
    5: (_sphere, _sphere),
    6: (_rosenbrock, _schwefel),
    7: (_ackley, _rosenbrock),
    8: (_griewank, _sphere),
    9: (_sphere, _ackley),
}

_LINEAR_LINKAGE_IDS = {1, 2, 3, 4}
_FRONT_SHAPES = {1: "linear", 2: "linear", 3: "linear", 4: "linear",
                 5: "spherical", 6: "spherical", 7: "spherical", 8: "spherical",
                 9: "disconnected"}


def _chaos_proportions(m: int) -> np.ndarray:
    """Logistic-map sequence that sizes the m variable groups non-uniformly."""
    c = [3.8 * 0.1 * (1.0 - 0.1)]
    for _ in range(m - 1):
        c.append(3.8 * c[-1] * (1.0 - c[-1]))
    c = np.asarray(c)
    return c / c.sum()


@dataclass(frozen=True)
class LsmopInstance:
    """One parameterized benchmark problem; immutable and safe to share.

    `groups` lists, per objective, the subcomponent column ranges into the
    linkage-transformed distance block (0-based, end-exclusive).
    """

    id: int
    m: int
    d: int
    nk: int
    bounds: BoxBounds
    groups: tuple[tuple[tuple[int, int], ...], ...]
    group_sizes: tuple[int, ...]
    linkage_factors: np.ndarray

    @property
    def name(self) -> str:
        return f"lsmop{self.id}"

    @property
    def n_position(self) -> int:
        return self.m - 1

    @property
    def n_distance(self) -> int:
        return self.d - self.m + 1

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Objective vector for a single solution (length d, within bounds)."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.d,):
            raise ValueError(f"expected a decision vector of length {self.d}, got {x.shape}")
        return self.evaluate_batch(x[None, :])[0]

    def evaluate_batch(self, xs: np.ndarray) -> np.ndarray:
        """Objective matrix (n, m) for a batch of solutions (n, d)."""
        xs = np.asarray(xs, dtype=float)
        if xs.ndim != 2 or xs.shape[1] != self.d:
            raise ValueError(f"expected shape (n, {self.d}), got {xs.shape}")
        pos = xs[:, : self.m - 1]
        dist = self.linkage_factors * xs[:, self.m - 1:] - DISTANCE_BOUND * xs[:, [0]]

        odd_fn, even_fn = _LANDSCAPES[self.id]
        raw = np.zeros((xs.shape[0], self.m))
        for gi, subcomponents in enumerate(self.groups):
            fn = odd_fn if gi % 2 == 0 else even_fn
            for start, stop in subcomponents:
                raw[:, gi] += fn(dist[:, start:stop])

        if self.id == 9:
            shared = 1.0 + raw.sum(axis=1) / self.n_distance
            objs = np.empty((xs.shape[0], self.m))
            objs[:, : self.m - 1] = pos
            tail = np.sum(pos / (1.0 + shared[:, None]) * (1.0 + np.sin(3.0 * np.pi * pos)), axis=1)
            objs[:, self.m - 1] = (1.0 + shared) * (self.m - tail)
            return objs

        g = raw / np.asarray(self.group_sizes, dtype=float)
        ones = np.ones((xs.shape[0], 1))
        if _FRONT_SHAPES[self.id] == "linear":
            left = np.cumprod(np.hstack([ones, pos]), axis=1)[:, ::-1]
            right = np.hstack([ones, 1.0 - pos[:, ::-1]])
            return (1.0 + g) * left * right
        # spherical: each objective couples its own group with the next one
        angles = pos * (np.pi / 2.0)
        left = np.cumprod(np.hstack([ones, np.cos(angles)]), axis=1)[:, ::-1]
        right = np.hstack([ones, np.sin(angles[:, ::-1])])
        coupled = g + np.hstack([g[:, 1:], np.zeros((xs.shape[0], 1))])
        return (1.0 + coupled) * left * right


def make_lsmop(problem_id: int, m: int = 3, d: int = 300, nk: int = N_SUBCOMPONENTS) -> LsmopInstance:
    """Build an LSMOP instance; deterministic for fixed (problem_id, m, d, nk).

    Raises ValueError for an unknown id, d <= m, or a dimension too small for
    the nk-way chaos partition to give every subcomponent at least one column.
    """
    if problem_id not in _LANDSCAPES:
        raise ValueError(f"unknown problem id {problem_id}; expected 1..9")
    if m < 2:
        raise ValueError(f"need at least 2 objectives, got {m}")
    if d <= m:
        raise ValueError(f"decision dimension must exceed objective count, got d={d}, m={m}")
    if nk < 1:
        raise ValueError("nk must be positive")

    n_distance = d - m + 1
    sublen = np.floor(_chaos_proportions(m) * n_distance / nk).astype(int)
    if np.any(sublen < 1):
        raise ValueError(
            f"d={d} is too small to give every subcomponent a variable (m={m}, nk={nk})"
        )

    # Contiguous layout: m groups of nk subcomponents; the floor remainder is
    # absorbed by the final subcomponent so the partition covers every one of
    # the d-m+1 distance variables.
    groups: list[tuple[tuple[int, int], ...]] = []
    cursor = 0
    for gi in range(m):
        subs = []
        for si in range(nk):
            stop = cursor + int(sublen[gi])
            if gi == m - 1 and si == nk - 1:
                stop = n_distance
            subs.append((cursor, stop))
            cursor = stop
        groups.append(tuple(subs))
    group_sizes = tuple(subs[-1][1] - subs[0][0] for subs in groups)

    lower = np.zeros(d)
    upper = np.concatenate([
        np.full(m - 1, POSITION_BOUND),
        np.full(n_distance, DISTANCE_BOUND),
    ])

    # 1-based variable indices m..d drive the linkage factor for each
    # distance column.
    j = np.arange(m, d + 1, dtype=float)
    if problem_id in _LINEAR_LINKAGE_IDS:
        factors = 1.0 + j / d
    else:
        factors = 1.0 + np.cos(0.5 * np.pi * j / d)
    factors.setflags(write=False)

    return LsmopInstance(
        id=problem_id,
        m=m,
        d=d,
        nk=nk,
        bounds=BoxBounds(lower, upper),
        groups=tuple(groups),
        group_sizes=group_sizes,
        linkage_factors=factors,
    )


def simplex_lattice(m: int, divisions: int) -> np.ndarray:
    """All points with coordinates k_i/divisions, k_i >= 0, sum k_i = divisions."""
    points = []
    for bars in itertools.combinations(range(divisions + m - 1), m - 1):
        previous = -1
        counts = []
        for b in bars:
            counts.append(b - previous - 1)
            previous = b
        counts.append(divisions + m - 2 - previous)
        points.append(counts)
    return np.asarray(points, dtype=float) / divisions


def _largest_lattice(m: int, k: int) -> int:
    divisions = 1
    while math.comb(divisions + m, m - 1) <= k:
        divisions += 1
    return divisions


def _disconnected_positions(k: int, m: int) -> np.ndarray:
    """Deterministic grid over [0, 1]^(m-1) remapped into the disconnected bands."""
    (a0, a1), (b0, b1) = DISCONNECTED_INTERVALS
    len_a, len_b = a1 - a0, b1 - b0
    split = len_a / (len_a + len_b)
    if m == 2:
        grid = np.linspace(0.0, 1.0, k)[:, None]
    else:
        side = max(2, math.ceil(k ** (1.0 / (m - 1))))
        axis = np.linspace(0.0, 1.0, side)
        grid = np.stack(np.meshgrid(*([axis] * (m - 1)), indexing="ij"), axis=-1)
        grid = grid.reshape(-1, m - 1)
    low = grid <= split
    out = np.empty_like(grid)
    out[low] = a0 + grid[low] * (len_a / split)
    out[~low] = b0 + (grid[~low] - split) * (len_b / (1.0 - split))
    return out


def reference_front(instance: LsmopInstance, k: int) -> np.ndarray:
    """Deterministic, well-spread sample of the true Pareto-optimal front.

    Linear and spherical fronts use the densest simplex lattice with at most k
    points (so the extreme points are always included); the disconnected front
    uses a per-band grid of roughly k points.
    """
    if k < instance.m:
        raise ValueError(f"need at least m={instance.m} reference points, got {k}")
    shape = _FRONT_SHAPES[instance.id]
    if shape == "disconnected":
        pos = _disconnected_positions(k, instance.m)
        tail = instance.m - np.sum(pos / 2.0 * (1.0 + np.sin(3.0 * np.pi * pos)), axis=1)
        return np.hstack([pos, 2.0 * tail[:, None]])
    lattice = simplex_lattice(instance.m, _largest_lattice(instance.m, k))
    if shape == "linear":
        return lattice
    return lattice / np.linalg.norm(lattice, axis=1, keepdims=True)


def save_front_csv(points: np.ndarray, path) -> None:
    """Write objective vectors as headerless CSV rows, 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in np.atleast_2d(points):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_front_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


PROBLEM_IDS = tuple(sorted(_LANDSCAPES))


def problem_from_name(name: str, m: int = 3, d: int = 300) -> LsmopInstance:
    """Resolve CLI-style ids "lsmop1".."lsmop9"."""
    key = name.strip().lower()
    if not key.startswith("lsmop"):
        raise ValueError(f"unknown problem {name!r}")
    try:
        pid = int(key[len("lsmop"):])
    except ValueError:
        raise ValueError(f"unknown problem {name!r}") from None
    return make_lsmop(pid, m=m, d=d)

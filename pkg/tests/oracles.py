"""Independent reference implementations used as test oracles.

Everything here is deliberately written in plain Python (loops, math module)
or as explicit matrix constructions, structured differently from the
production code, so agreement between the two routes is meaningful.
"""

from __future__ import annotations

import math

import numpy as np

GAUSS_NORM = 1.0 / math.sqrt(2.0 * math.pi)


# --- dominance -------------------------------------------------------------

def dominates_scalar(a, b) -> bool:
    not_worse = all(x <= y for x, y in zip(a, b))
    better = any(x < y for x, y in zip(a, b))
    return not_worse and better


def nondominated_brute(vectors) -> list[bool]:
    """keep[i] is True when no other vector dominates vector i."""
    keep = []
    for i, a in enumerate(vectors):
        dominated = False
        for j, b in enumerate(vectors):
            if i != j and dominates_scalar(b, a):
                dominated = True
                break
        keep.append(not dominated)
    return keep


# --- metrics ---------------------------------------------------------------

def spacing_brute(front) -> float:
    front = [list(map(float, row)) for row in front]
    n = len(front)
    nearest = []
    for i in range(n):
        best = math.inf
        for j in range(n):
            if i != j:
                best = min(best, math.dist(front[i], front[j]))
        nearest.append(best)
    mean = sum(nearest) / n
    return math.sqrt(sum((e - mean) ** 2 for e in nearest) / (n - 1))


def igd_brute(reference, front, squared: bool = False) -> float:
    total = 0.0
    for r in reference:
        best = math.inf
        for p in front:
            best = min(best, math.dist(list(map(float, r)), list(map(float, p))))
        total += best * best if squared else best
    return total / len(reference)


# --- KDE / importance weights (Gaussian kernel on min-max normalized points) -

def minmax_rows(points) -> list[list[float]]:
    points = [list(map(float, row)) for row in points]
    cols = len(points[0])
    out = [[0.0] * cols for _ in points]
    for c in range(cols):
        lo = min(row[c] for row in points)
        hi = max(row[c] for row in points)
        if hi > lo:
            for r, row in enumerate(points):
                out[r][c] = (row[c] - lo) / (hi - lo)
    return out


def kde_densities_brute(points, h: float, normalize: bool = True) -> list[float]:
    pts = minmax_rows(points) if normalize else [list(map(float, r)) for r in points]
    n = len(pts)
    densities = []
    for k in range(n):
        acc = 0.0
        for i in range(n):
            t = math.dist(pts[k], pts[i]) / h
            acc += GAUSS_NORM * math.exp(-0.5 * t * t)
        densities.append(acc / (n * h))
    return densities


def importance_weights_brute(points, h: float) -> list[float]:
    spars = [1.0 / max(d, 1e-12) for d in kde_densities_brute(points, h)]
    total = sum(spars)
    return [s / total for s in spars]


def neighbor_mass_brute(points, h: float) -> list[float]:
    """Scalar log-sum-exp of the non-self kernel exponents; density ordering."""
    pts = minmax_rows(points)
    scores = []
    for a in range(len(pts)):
        terms = [
            -0.5 * (math.dist(pts[a], pts[b]) / h) ** 2
            for b in range(len(pts))
            if a != b
        ]
        peak = max(terms)
        scores.append(peak + math.log(sum(math.exp(t - peak) for t in terms)))
    return scores


def truncation_survivors_brute(points, h: float, capacity: int) -> list[int]:
    """Repeated densest-removal (ties: lowest index) by direct recomputation,
    ranking through the underflow-free log form of the density."""
    alive = list(range(len(points)))
    while len(alive) > capacity:
        scores = neighbor_mass_brute([points[i] for i in alive], h)
        alive.pop(max(range(len(scores)), key=lambda i: (scores[i], -i)))
    return alive


# --- explicit basis-completion rotation ------------------------------------

def gram_schmidt_rotation(v) -> np.ndarray:
    """Explicit O(d^2) rotation matrix R with R @ v = e1, built by
    orthonormalizing [v, basis vectors] with the column at v's first nonzero
    index swapped for the last basis vector.
    """
    v = np.asarray(v, dtype=float)
    n = v.size
    t = int(np.nonzero(v)[0][0])
    columns = [v]
    for i in range(n - 1):
        e = np.zeros(n)
        e[n - 1 if i == t else i] = 1.0
        columns.append(e)
    basis: list[np.ndarray] = []
    for col in columns:
        w = col.astype(float).copy()
        for q in basis:
            w -= (q @ col) * q
        basis.append(w / np.linalg.norm(w))
    return np.array(basis)


# --- scalar LSMOP evaluation -------------------------------------------------

def _sphere(z):
    return sum(val * val for val in z)


def _schwefel(z):
    return max(abs(val) for val in z)


def _rosenbrock(z):
    return sum(
        100.0 * (z[i] ** 2 - z[i + 1]) ** 2 + (z[i] - 1.0) ** 2 for i in range(len(z) - 1)
    )


def _rastrigin(z):
    return sum(val * val - 10.0 * math.cos(2.0 * math.pi * val) + 10.0 for val in z)


def _griewank(z):
    prod = 1.0
    for i, val in enumerate(z, start=1):
        prod *= math.cos(val / math.sqrt(i))
    return sum(val * val for val in z) / 4000.0 - prod + 1.0


def _ackley(z):
    k = len(z)
    sq = sum(val * val for val in z) / k
    cs = sum(math.cos(2.0 * math.pi * val) for val in z) / k
    return 20.0 - 20.0 * math.exp(-0.2 * math.sqrt(sq)) - math.exp(cs) + math.e


_PAIRS = {
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


def lsmop_groups(m: int, d: int, nk: int = 5):
    """(subcomponent ranges per group, group sizes) of the distance block."""
    n_dist = d - m + 1
    c = [3.8 * 0.1 * (1.0 - 0.1)]
    for _ in range(m - 1):
        c.append(3.8 * c[-1] * (1.0 - c[-1]))
    total = sum(c)
    sublen = [math.floor(ci / total * n_dist / nk) for ci in c]
    groups = []
    cursor = 0
    for gi in range(m):
        subs = []
        for si in range(nk):
            stop = cursor + sublen[gi]
            if gi == m - 1 and si == nk - 1:
                stop = n_dist
            subs.append((cursor, stop))
            cursor = stop
        groups.append(subs)
    sizes = [subs[-1][1] - subs[0][0] for subs in groups]
    return groups, sizes


def lsmop_evaluate_scalar(problem_id: int, m: int, d: int, x, nk: int = 5) -> list[float]:
    x = [float(val) for val in x]
    pos = x[: m - 1]
    n_dist = d - m + 1

    linked = []
    for offset in range(n_dist):
        j = m + offset  # 1-based variable index
        if problem_id <= 4:
            factor = 1.0 + j / d
        else:
            factor = 1.0 + math.cos(0.5 * math.pi * j / d)
        linked.append(factor * x[m - 1 + offset] - 10.0 * x[0])

    odd_fn, even_fn = _PAIRS[problem_id]
    groups, sizes = lsmop_groups(m, d, nk)
    raw = []
    for gi, subs in enumerate(groups):
        fn = odd_fn if gi % 2 == 0 else even_fn
        raw.append(sum(fn(linked[a:b]) for a, b in subs))

    if problem_id == 9:
        shared = 1.0 + sum(raw) / n_dist
        objs = list(pos)
        tail = sum(
            objs[i] / (1.0 + shared) * (1.0 + math.sin(3.0 * math.pi * objs[i]))
            for i in range(m - 1)
        )
        objs.append((1.0 + shared) * (m - tail))
        return objs

    g = [raw[i] / sizes[i] for i in range(m)]
    objs = []
    if problem_id <= 4:
        for i in range(m):
            val = 1.0 + g[i]
            for j in range(m - 1 - i):
                val *= pos[j]
            if i > 0:
                val *= 1.0 - pos[m - 1 - i]
            objs.append(val)
    else:
        for i in range(m):
            val = 1.0 + g[i] + (g[i + 1] if i + 1 < m else 0.0)
            for j in range(m - 1 - i):
                val *= math.cos(pos[j] * math.pi / 2.0)
            if i > 0:
                val *= math.sin(pos[m - 1 - i] * math.pi / 2.0)
            objs.append(val)
    return objs

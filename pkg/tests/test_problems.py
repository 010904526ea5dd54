import time

import numpy as np
import pytest

from ltppm.problems import (
    DISCONNECTED_INTERVALS,
    LsmopInstance,
    load_front_csv,
    make_lsmop,
    problem_from_name,
    reference_front,
    save_front_csv,
    simplex_lattice,
)

from oracles import lsmop_evaluate_scalar

ALL_IDS = range(1, 10)


def random_solutions(instance: LsmopInstance, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(instance.bounds.lower, instance.bounds.upper, size=(count, instance.d))


def test_make_lsmop_validation():
    with pytest.raises(ValueError):
        make_lsmop(0, 3, 300)
    with pytest.raises(ValueError):
        make_lsmop(10, 3, 300)
    with pytest.raises(ValueError):
        make_lsmop(1, 3, 2)
    with pytest.raises(ValueError):
        make_lsmop(1, 1, 300)


def test_position_and_distance_split():
    inst = make_lsmop(1, 3, 1000)
    assert inst.n_position == 2
    assert inst.n_distance == 998
    assert inst.bounds.upper[:2].tolist() == [1.0, 1.0]
    assert inst.bounds.upper[2:].tolist() == [10.0] * 998


@pytest.mark.parametrize("pid", ALL_IDS)
@pytest.mark.parametrize("m,d", [(3, 40), (3, 300), (2, 80), (4, 150)])
def test_group_partition_covers_distance_block(pid, m, d):
    inst = make_lsmop(pid, m, d)
    assert all(size > 0 for size in inst.group_sizes)
    assert sum(inst.group_sizes) == d - m + 1
    flat = [rng for group in inst.groups for rng in group]
    cursor = 0
    for start, stop in flat:
        assert start == cursor and stop > start
        cursor = stop
    assert cursor == d - m + 1


@pytest.mark.parametrize("pid", ALL_IDS)
def test_evaluate_matches_scalar_oracle(pid):
    for m, d in ((3, 40), (3, 133)):
        inst = make_lsmop(pid, m, d)
        xs = random_solutions(inst, 60, seed=pid * 100 + d)
        batch = inst.evaluate_batch(xs)
        for i in range(len(xs)):
            expected = lsmop_evaluate_scalar(pid, m, d, xs[i])
            np.testing.assert_allclose(batch[i], expected, rtol=1e-10, atol=1e-10)


def test_evaluate_single_matches_batch_and_is_deterministic():
    inst = make_lsmop(4, 3, 60)
    xs = random_solutions(inst, 5, seed=0)
    batch = inst.evaluate_batch(xs)
    for i in range(5):
        one = inst.evaluate(xs[i])
        np.testing.assert_array_equal(one, batch[i])
        np.testing.assert_array_equal(one, inst.evaluate(xs[i]))


def test_evaluate_rejects_wrong_dimension():
    inst = make_lsmop(1, 3, 40)
    with pytest.raises(ValueError):
        inst.evaluate(np.zeros(41))
    with pytest.raises(ValueError):
        inst.evaluate_batch(np.zeros((2, 39)))


def distance_optimum(inst: LsmopInstance, x1: float, rest: np.ndarray) -> np.ndarray:
    """Solution whose linkage-transformed distance variables are all zero."""
    x = np.empty(inst.d)
    x[0] = x1
    x[1: inst.m - 1] = rest
    x[inst.m - 1:] = 10.0 * x1 / inst.linkage_factors
    return x


@pytest.mark.parametrize("pid,check", [(1, "linear"), (2, "linear"), (5, "spherical"), (8, "spherical")])
def test_distance_optimum_lands_on_front(pid, check):
    inst = make_lsmop(pid, 3, 120)
    rng = np.random.default_rng(pid)
    for _ in range(10):
        x = distance_optimum(inst, rng.uniform(0, 1), rng.uniform(0, 1, inst.m - 2))
        f = inst.evaluate(x)
        if check == "linear":
            assert abs(f.sum() - 1.0) < 1e-6
        else:
            assert abs((f**2).sum() - 1.0) < 1e-6


@pytest.mark.parametrize("pid", ALL_IDS)
def test_objectives_nonnegative_randomized(pid):
    inst = make_lsmop(pid, 3, 40)
    xs = random_solutions(inst, 100_000, seed=pid)
    objs = inst.evaluate_batch(xs)
    assert np.isfinite(objs).all()
    assert (objs >= 0.0).all()


def test_distance_perturbation_never_dominates():
    inst = make_lsmop(1, 3, 90)
    rng = np.random.default_rng(11)
    for _ in range(40):
        base = distance_optimum(inst, rng.uniform(0, 1), rng.uniform(0, 1, 1))
        f_base = inst.evaluate(base)
        worse = base.copy()
        idx = rng.integers(inst.m - 1, inst.d, size=5)
        worse[idx] = np.clip(worse[idx] + rng.normal(0, 2.0, 5), 0.0, 10.0)
        f_worse = inst.evaluate(worse)
        assert not (np.all(f_worse <= f_base) and np.any(f_worse < f_base))


def test_simplex_lattice_and_linear_front():
    inst = make_lsmop(1, 3, 40)
    front = reference_front(inst, 3)
    corners = sorted(front.tolist())
    assert corners == [[0, 0, 1], [0, 1, 0], [1, 0, 0]]
    big = reference_front(inst, 2000)
    assert len(big) <= 2000
    assert np.abs(big.sum(axis=1) - 1.0).max() < 1e-9
    for corner in corners:
        assert any(np.array_equal(row, corner) for row in big)


def test_spherical_front_membership():
    inst = make_lsmop(5, 3, 300)
    front = reference_front(inst, 3000)
    assert np.abs((front**2).sum(axis=1) - 1.0).max() < 1e-9
    assert (front >= 0).all()


def test_disconnected_front_membership():
    inst = make_lsmop(9, 3, 40)
    front = reference_front(inst, 500)
    pos = front[:, :2]
    (a0, a1), (b0, b1) = DISCONNECTED_INTERVALS
    in_bands = ((pos >= a0) & (pos <= a1)) | ((pos >= b0) & (pos <= b1))
    assert in_bands.all()
    expected = 2.0 * (3.0 - np.sum(pos / 2.0 * (1.0 + np.sin(3.0 * np.pi * pos)), axis=1))
    np.testing.assert_allclose(front[:, 2], expected, atol=1e-12)


def test_reference_front_deterministic_and_validated():
    inst = make_lsmop(2, 3, 40)
    np.testing.assert_array_equal(reference_front(inst, 500), reference_front(inst, 500))
    with pytest.raises(ValueError):
        reference_front(inst, 2)


def test_lattice_counts():
    assert len(simplex_lattice(3, 1)) == 3
    assert len(simplex_lattice(3, 4)) == 15
    assert len(simplex_lattice(2, 9)) == 10


def test_problem_from_name():
    assert problem_from_name("lsmop7", 3, 50).id == 7
    assert problem_from_name(" LSMOP2 ").id == 2
    for bad in ("dtlz1", "lsmopx", "lsmop12"):
        with pytest.raises(ValueError):
            problem_from_name(bad)


def test_front_csv_round_trip(tmp_path):
    inst = make_lsmop(5, 3, 40)
    front = reference_front(inst, 100)
    path = tmp_path / "front.csv"
    save_front_csv(front, path)
    text = path.read_text().splitlines()
    assert len(text) == len(front)
    assert "," in text[0] and not text[0][0].isalpha()
    np.testing.assert_array_equal(load_front_csv(path), front)


def test_evaluation_cost_scales_roughly_linearly():
    small = make_lsmop(1, 3, 200)
    large = make_lsmop(1, 3, 2000)
    xs_small = random_solutions(small, 400, seed=1)
    xs_large = random_solutions(large, 400, seed=2)
    small.evaluate_batch(xs_small)
    large.evaluate_batch(xs_large)

    def best_of(fn, reps=3):
        times = []
        for _ in range(reps):
            start = time.perf_counter()
            fn()
            times.append(time.perf_counter() - start)
        return min(times)

    t_small = best_of(lambda: small.evaluate_batch(xs_small))
    t_large = best_of(lambda: large.evaluate_batch(xs_large))
    assert t_large / t_small <= 15.0

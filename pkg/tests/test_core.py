import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ltppm.core import (
    BoxBounds,
    BudgetExhausted,
    EvaluationBudget,
    Particle,
    RandomStream,
    clamp_to_bounds,
    dominates,
    evaluate_counted,
    nondominated_mask,
)
from ltppm.problems import make_lsmop

from oracles import nondominated_brute

vectors3 = st.lists(st.integers(min_value=0, max_value=4), min_size=3, max_size=3)


def test_dominates_examples():
    assert dominates((1, 2, 3), (1, 2, 3)) is False
    assert dominates((0, 2, 3), (1, 2, 3)) is True
    assert dominates((0, 5, 0), (1, 2, 3)) is False


def test_dominates_length_mismatch():
    with pytest.raises(ValueError):
        dominates((1, 2), (1, 2, 3))


@given(vectors3)
def test_dominates_irreflexive(a):
    assert dominates(a, a) is False


@given(vectors3, vectors3, vectors3)
def test_dominates_transitive(a, b, c):
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


def test_nondominated_mask_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(25):
        pts = rng.integers(0, 6, size=(rng.integers(1, 40), 3)).astype(float)
        assert nondominated_mask(pts).tolist() == nondominated_brute(pts.tolist())


def test_clamp_examples():
    bounds = BoxBounds(np.array([0.0, 0.0, 0.0]), np.array([10.0, 10.0, 1.0]))
    x = np.array([5.0, 12.0, -0.5])
    out = clamp_to_bounds(x, bounds)
    assert out.tolist() == [5.0, 10.0, 0.0]
    inside = np.array([1.0, 2.0, 0.5])
    assert clamp_to_bounds(inside, bounds).tolist() == inside.tolist()


@given(st.lists(st.floats(-1e6, 1e6), min_size=4, max_size=4))
def test_clamp_idempotent(values):
    bounds = BoxBounds(np.full(4, -3.0), np.full(4, 7.5))
    once = clamp_to_bounds(np.array(values), bounds)
    assert clamp_to_bounds(once, bounds).tolist() == once.tolist()


def test_bounds_validation():
    with pytest.raises(ValueError):
        BoxBounds(np.array([1.0]), np.array([0.0]))
    with pytest.raises(ValueError):
        BoxBounds(np.array([0.0, np.inf]), np.array([1.0, 2.0]))


def test_particle_requires_unit_direction():
    with pytest.raises(ValueError):
        Particle(np.zeros(3), np.zeros(2), np.array([1.0, 1.0, 0.0]))
    p = Particle(np.zeros(3), np.zeros(2), np.array([0.0, 1.0, 0.0]))
    assert not p.solution.flags.writeable
    assert not p.direction.flags.writeable


def test_budget_counting_and_exhaustion():
    problem = make_lsmop(1, 3, 40)
    x = np.zeros(40)
    budget = EvaluationBudget(limit=2)
    first = evaluate_counted(problem, x, budget)
    assert budget.used == 1
    second = evaluate_counted(problem, x, budget)
    assert budget.used == 2
    assert np.array_equal(first, second)
    with pytest.raises(BudgetExhausted):
        evaluate_counted(problem, x, budget)
    assert budget.used == 2


def test_budget_take_clips_to_remaining():
    budget = EvaluationBudget(limit=5, used=3)
    assert budget.take(4) == 2
    assert budget.exhausted
    assert budget.take(1) == 0


def test_random_stream_reproducible_first_million_draws():
    a = RandomStream(12345).generator.standard_normal(10**6)
    b = RandomStream(12345).generator.standard_normal(10**6)
    assert np.array_equal(a, b)


def test_random_stream_spawn_deterministic_and_distinct():
    kids1 = RandomStream(7).spawn(3)
    kids2 = RandomStream(7).spawn(3)
    draws1 = [k.generator.random(4).tolist() for k in kids1]
    draws2 = [k.generator.random(4).tolist() for k in kids2]
    assert draws1 == draws2
    assert draws1[0] != draws1[1]


def test_unit_vector_has_unit_norm():
    rng = RandomStream(0)
    for dim in (1, 2, 17):
        v = rng.unit_vector(dim)
        assert abs(np.linalg.norm(v) - 1.0) < 1e-12

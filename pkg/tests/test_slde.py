import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acdeduce.oracles import brute_force_slde
from acdeduce.slde import DiophantineSystem, NegativeCoefficientError, solve_n_bounded, solve_z


def test_examples():
    beta = solve_z(DiophantineSystem.of([[2, 3]], [1]))
    assert beta is not None and 2 * beta[0] + 3 * beta[1] == 1
    assert solve_z(DiophantineSystem.of([[2, 4]], [1])) is None
    assert solve_z(DiophantineSystem.of([[1, 1], [1, -1]], [1, 0])) is None
    assert solve_z(DiophantineSystem.of([[1, 1], [1, -1]], [2, 0])) == (1, 1)
    assert solve_n_bounded(DiophantineSystem.of([[1, 1]], [2]), 2) is not None
    assert solve_n_bounded(DiophantineSystem.of([[2]], [3]), 5) is None


def test_empty_systems():
    assert solve_z(DiophantineSystem.of([], [], 2)) == (0, 0)
    assert solve_z(DiophantineSystem.of([[]], [0], 0)) == ()
    assert solve_z(DiophantineSystem.of([[]], [1], 0)) is None


def test_shape_errors():
    with pytest.raises(ValueError):
        DiophantineSystem.of([[1, 2]], [1, 2])
    with pytest.raises(NegativeCoefficientError):
        solve_n_bounded(DiophantineSystem.of([[1, -1]], [0]), 3)


def systems(lo, hi):
    return st.integers(1, 3).flatmap(
        lambda q: st.integers(1, 3).flatmap(
            lambda p: st.tuples(
                st.lists(st.lists(st.integers(lo, hi), min_size=q, max_size=q), min_size=p, max_size=p),
                st.lists(st.integers(lo, hi), min_size=p, max_size=p),
            ).map(lambda rt: DiophantineSystem.of(rt[0], rt[1], q))
        )
    )


@settings(max_examples=300, deadline=None)
@given(systems(-3, 3))
def test_z_agrees_with_brute_force(sys):
    beta = solve_z(sys)
    if beta is not None:
        assert sys.satisfied_by(beta)
    else:
        assert brute_force_slde(sys, 6) is None
    if brute_force_slde(sys, 3) is not None:
        assert beta is not None


@settings(max_examples=300, deadline=None)
@given(systems(0, 3))
def test_n_bounded_agrees_with_brute_force(sys):
    beta = solve_n_bounded(sys, 3)
    expected = brute_force_slde(sys, 3, naturals=True)
    assert (beta is None) == (expected is None)
    if beta is not None:
        assert sys.satisfied_by(beta) and all(0 <= b <= 3 for b in beta)


def test_large_random_systems_are_solved():
    rng = random.Random(1)
    for _ in range(50):
        q = rng.randint(3, 8)
        rows = [[rng.randint(-9, 9) for _ in range(q)] for _ in range(rng.randint(1, 6))]
        x = [rng.randint(-20, 20) for _ in range(q)]
        targets = [sum(r * v for r, v in zip(row, x)) for row in rows]
        sys = DiophantineSystem.of(rows, targets, q)
        beta = solve_z(sys)
        assert beta is not None and sys.satisfied_by(beta)

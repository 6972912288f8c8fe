import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpt_lab.numerics import LinearProgram, bisect, shannon_entropy, solve_lp


def test_lp_optimal_value():
    # min -x - 2y  s.t. x + y <= 4, x <= 3, x,y >= 0
    p = LinearProgram(
        2,
        objective=np.array([-1.0, -2.0]),
        a_ub=np.array([[1.0, 1.0], [1.0, 0.0]]),
        b_ub=np.array([4.0, 3.0]),
        lower_bounds=np.zeros(2),
    )
    r = solve_lp(p)
    assert r.status == "optimal"
    assert r.value == pytest.approx(-8.0, abs=1e-9)
    assert r.x == pytest.approx([0.0, 4.0], abs=1e-9)


def test_lp_equality_and_free_vars():
    # x + y = 1 with free variables, minimize x
    p = LinearProgram(
        2,
        objective=np.array([1.0, 0.0]),
        a_eq=np.array([[1.0, 1.0]]),
        b_eq=np.array([1.0]),
        a_ub=np.array([[-1.0, 0.0]]),
        b_ub=np.array([5.0]),
    )
    r = solve_lp(p)
    assert r.status == "optimal"
    assert r.value == pytest.approx(-5.0, abs=1e-9)


def test_lp_infeasible():
    p = LinearProgram(
        1,
        a_eq=np.array([[1.0]]),
        b_eq=np.array([2.0]),
        a_ub=np.array([[1.0]]),
        b_ub=np.array([1.0]),
        lower_bounds=np.zeros(1),
    )
    assert solve_lp(p).status == "infeasible"


def test_lp_unbounded():
    p = LinearProgram(1, objective=np.array([-1.0]), lower_bounds=np.zeros(1))
    assert solve_lp(p).status == "unbounded"


def test_lp_feasibility_only():
    p = LinearProgram(
        2,
        a_eq=np.array([[1.0, 1.0]]),
        b_eq=np.array([1.0]),
        lower_bounds=np.zeros(2),
    )
    r = solve_lp(p)
    assert r.status == "feasible"
    assert r.x.sum() == pytest.approx(1.0, abs=1e-9)


def test_lp_shifted_lower_bounds():
    p = LinearProgram(
        1,
        objective=np.array([1.0]),
        lower_bounds=np.array([2.5]),
    )
    r = solve_lp(p)
    assert r.status == "optimal"
    assert r.x[0] == pytest.approx(2.5, abs=1e-12)


def test_lp_validation_errors():
    with pytest.raises(ValueError):
        LinearProgram(2, a_eq=np.ones((1, 3)), b_eq=np.ones(1)).validate()
    with pytest.raises(ValueError):
        solve_lp(LinearProgram(1), tol_lp=0.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_lp_random_solutions_are_feasible(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 5), rng.integers(2, 6)
    a = rng.normal(size=(m, n))
    x0 = rng.uniform(0.2, 1.0, size=n)
    b = a @ x0  # guarantees feasibility
    p = LinearProgram(
        int(n),
        # positive costs keep the problem bounded below on x >= 0
        objective=rng.uniform(0.1, 1.0, size=n),
        a_ub=a,
        b_ub=b,
        lower_bounds=np.zeros(n),
    )
    r = solve_lp(p)
    assert r.status == "optimal"
    assert np.all(a @ r.x <= b + 1e-8)
    assert np.all(r.x >= -1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 10.0))
def test_lp_row_scaling_keeps_verdict(seed, scale):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(3, 3))
    b = rng.normal(size=3)
    base = LinearProgram(3, a_eq=a, b_eq=b, lower_bounds=np.zeros(3))
    scaled = LinearProgram(3, a_eq=scale * a, b_eq=scale * b, lower_bounds=np.zeros(3))
    assert solve_lp(base).status == solve_lp(scaled).status


def test_bisect_locates_root():
    root = bisect(lambda x: x * x - 2.0, 0.0, 2.0, tol=1e-12)
    assert root == pytest.approx(math.sqrt(2.0), abs=1e-10)


def test_bisect_requires_sign_change():
    with pytest.raises(ValueError):
        bisect(lambda x: 1.0, 0.0, 1.0)


def test_entropy_basics():
    assert shannon_entropy([0.5, 0.5]) == pytest.approx(math.log(2.0))
    assert shannon_entropy([1.0, 0.0]) == 0.0
    assert shannon_entropy([0.25] * 4, base=2) == pytest.approx(2.0)


def test_entropy_rejects_bad_input():
    with pytest.raises(ValueError):
        shannon_entropy([0.7, 0.7])
    with pytest.raises(ValueError):
        shannon_entropy([-0.1, 1.1])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=6), st.randoms())
def test_entropy_permutation_invariant(weights, rnd):
    total = sum(weights)
    if total < 1e-9:
        weights[0] += 1.0
        total = sum(weights)
    p = [w / total for w in weights]
    q = list(p)
    rnd.shuffle(q)
    assert shannon_entropy(p) == pytest.approx(shannon_entropy(q), abs=1e-12)

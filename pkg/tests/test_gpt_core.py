import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpt_lab.gpt_core import (
    Theory,
    convert_effect,
    convert_state,
    eigenstate_of,
    is_effect,
    is_state,
    make_disc,
    make_polygon,
    make_simplex,
    polygon_radius,
    to_rescaled,
)


def test_polygon_radius_values():
    assert polygon_radius(4) == pytest.approx(2.0 ** 0.25)
    assert polygon_radius(3) == pytest.approx(math.sqrt(2.0))


def test_simplex_pure_states_are_distinguishable_by_construction():
    t = make_simplex(4)
    for i, w in enumerate(t.pure_states):
        vals = [t.pair(e, w) for e in np.eye(4)]
        assert vals[i] == pytest.approx(1.0)
        assert sum(vals) == pytest.approx(1.0)


def test_polygon_states_on_circle():
    t = make_polygon(7)
    r = polygon_radius(7)
    for w in t.pure_states:
        assert math.hypot(w[0], w[1]) == pytest.approx(r, abs=1e-12)
        assert w[2] == 1.0


def test_maximally_mixed():
    assert make_polygon(6).maximally_mixed() == pytest.approx([0, 0, 1], abs=1e-12)
    assert make_disc().maximally_mixed() == pytest.approx([0, 0, 1])
    assert make_simplex(3).maximally_mixed() == pytest.approx([1 / 3] * 3)


def test_state_membership():
    t = make_polygon(5)
    assert is_state(t, t.maximally_mixed())
    assert is_state(t, t.pure_states[2])
    outside = t.pure_states[0].copy()
    outside[0] *= 1.01
    assert not is_state(t, outside)


def test_effect_membership_disc():
    t = make_disc()
    assert is_effect(t, t.disc_extreme_effect(1.0))
    assert is_effect(t, t.unit_effect)
    assert not is_effect(t, np.array([0.8, 0.0, 0.5]))


def test_effect_values_on_square():
    # e_0 hits 1 on its two adjacent vertices and 0 on the opposite pair
    t = make_polygon(4)
    e0 = t.extreme_effects()[0]
    vals = [t.pair(e0, w) for w in t.pure_states]
    assert vals == pytest.approx([1.0, 0.0, 0.0, 1.0], abs=1e-12)


def test_odd_effects_hit_unit_on_own_vertex():
    t = make_polygon(5)
    ext = t.extreme_effects()
    for i in range(5):
        assert t.pair(ext[i], t.pure_states[i]) == pytest.approx(1.0, abs=1e-12)


def test_json_round_trip():
    for t in (make_simplex(3), make_polygon(6, "rescaled"), make_disc(32)):
        t2 = Theory.from_json(t.to_json())
        assert t2.kind == t.kind
        assert t2.n == t.n
        assert t2.representation == t.representation


def test_eigenstate_requires_self_dual_even_polygon():
    t = make_polygon(6)
    with pytest.raises(ValueError):
        eigenstate_of(t, t.extreme_effects()[0])
    tr = to_rescaled(t)
    w = eigenstate_of(tr, tr.extreme_effects()[0])
    assert is_state(tr, w)


def test_eigenstate_simplex():
    t = make_simplex(3)
    w = eigenstate_of(t, np.array([0.5, 0.5, 0.0]))
    assert w == pytest.approx([0.5, 0.5, 0.0])


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.integers(0, 1000))
def test_rescaled_representation_preserves_statistics(half_n, seed):
    # mixed state x random effect: <e, w> must not depend on representation
    n = 2 * half_n + 2
    t = make_polygon(n)
    tr = to_rescaled(t)
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(n))
    w = probs @ t.pure_states
    e = t.extreme_effects()[rng.integers(0, n)]
    lhs = t.pair(e, w)
    rhs = tr.pair(convert_effect(e, t, tr), convert_state(w, t, tr))
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_constructor_validation():
    with pytest.raises(ValueError):
        make_polygon(2)
    with pytest.raises(ValueError):
        make_polygon(5, "rescaled")
    with pytest.raises(ValueError):
        make_simplex(1)
    with pytest.raises(ValueError):
        make_disc(4)

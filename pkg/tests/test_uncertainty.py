import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpt_lab.compatibility import mutually_unbiased_pair, sample_feasible_joints
from gpt_lab.gpt_core import make_disc, make_polygon, make_simplex
from gpt_lab.observables import (
    Observable,
    discrete_metric,
    fuzz,
    ideal_observables,
)
from gpt_lab.uncertainty import (
    entropic_noise,
    entropic_pur_bound,
    error_bar_width,
    gamma_closed_form,
    landau_pollak_gamma,
    linf_distance,
    localization_error,
    majorization_vector,
    max_statistics_sum,
    overall_width,
    theorem_witness_state,
    werner_measure,
)

SQ2INV = 1.0 / math.sqrt(2.0)


def coin(t):
    u = t.unit_effect
    return Observable(t, [0.5 * u, 0.5 * u])


def sharp_disc_pair(angle=0.0):
    t = make_disc()
    e = t.disc_extreme_effect(angle)
    return t, Observable(t, [e, t.unit_effect - e])


def test_overall_width_cases():
    d = discrete_metric(2)
    assert overall_width([1.0, 0.0], d, 0.1) == 0.0
    assert overall_width([0.5, 0.5], d, 0.1) == 2.0
    assert overall_width([0.5, 0.5], d, 0.5) == 0.0


def test_localization_error():
    assert localization_error([0.7, 0.3]) == pytest.approx(0.3)
    assert localization_error([1.0, 0.0]) == 0.0


def test_error_bar_width_exact_and_coin():
    t, f = sharp_disc_pair()
    assert error_bar_width(f, f, 0.1) == 0.0
    assert error_bar_width(coin(t), f, 0.1) == 2.0
    assert error_bar_width(coin(t), f, 0.5) == 0.0


def test_error_bar_width_epsilon_checked():
    t, f = sharp_disc_pair()
    with pytest.raises(ValueError):
        error_bar_width(f, f, 1.5)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 1.0))
def test_linf_distance_of_fuzzing(lam):
    t, f = sharp_disc_pair(0.3)
    assert linf_distance(fuzz(f, lam), f) == pytest.approx((1 - lam) / 2, abs=1e-9)


def test_werner_measure_binary_reduction():
    t, f = sharp_disc_pair()
    g = fuzz(f, 0.6)
    assert werner_measure(g, f) == pytest.approx(linf_distance(g, f), abs=1e-9)
    assert werner_measure(f, f) == 0.0


def test_entropic_noise():
    t, f = sharp_disc_pair()
    assert entropic_noise(f, f) == pytest.approx(0.0, abs=1e-9)
    assert entropic_noise(coin(t), f) == pytest.approx(math.log(2.0), abs=1e-9)


def test_entropic_noise_rejects_non_self_dual():
    t = make_polygon(6)  # standard representation
    f = ideal_observables(t)[0]
    with pytest.raises(ValueError):
        entropic_noise(f, f)


def test_entropic_pur_bound_values():
    assert entropic_pur_bound(2.0) == 0.0
    assert entropic_pur_bound(1.0) == pytest.approx(2 * math.log(2.0))
    assert entropic_pur_bound(1 + SQ2INV) == pytest.approx(0.3166943676, abs=1e-9)
    with pytest.raises(ValueError):
        entropic_pur_bound(2.5)


def test_gamma_disc_right_angle():
    assert gamma_closed_form(None, math.pi / 2) == pytest.approx(1 + SQ2INV, abs=1e-12)


def test_gamma_closed_form_argument_checks():
    with pytest.raises(ValueError):
        gamma_closed_form(None, 0.0)
    with pytest.raises(ValueError):
        gamma_closed_form(8, 0.1)  # not a lattice angle of the octagon


def test_landau_pollak_table_small():
    assert landau_pollak_gamma(make_polygon(3), 1) == pytest.approx(2.0, abs=1e-12)
    got = landau_pollak_gamma(make_polygon(6), 2)
    # numeric maximum is asserted inside; spot value from the even table
    r2 = 1.0 / math.cos(math.pi / 6)
    assert got == pytest.approx(max(1 + math.cos(math.pi / 3),
                                    1 + r2 * math.sin(math.pi / 3)), abs=1e-12)


def test_majorization_mu_pair():
    t = make_disc()
    f, g = mutually_unbiased_pair(t, 1.0)
    r = majorization_vector(f, g)
    gamma = max_statistics_sum(f, g)
    assert r[0] == pytest.approx(gamma * gamma / 4.0, abs=1e-9)
    assert r.sum() == pytest.approx(1.0, abs=1e-9)
    assert r[2] == pytest.approx(0.0, abs=1e-9) and r[3] == pytest.approx(0.0, abs=1e-9)


def test_majorization_self_pair_is_deterministic():
    t, f = sharp_disc_pair()
    r = majorization_vector(f, f)
    assert r == pytest.approx([1.0, 0.0, 0.0, 0.0], abs=1e-9)


def test_majorization_entropy_bound():
    # H(r) lower-bounds the entropic sum on every state
    t = make_disc()
    f, g = mutually_unbiased_pair(t, 1.0)
    r = majorization_vector(f, g)
    from gpt_lab.numerics import shannon_entropy
    from gpt_lab.observables import measure

    hr = shannon_entropy(r)
    rng = np.random.default_rng(0)
    for theta in rng.uniform(0, 2 * math.pi, size=25):
        w = t.disc_state(theta)
        hsum = shannon_entropy(measure(f, w)) + shannon_entropy(measure(g, w))
        assert hsum >= hr - 1e-9


def test_witness_state_slacks():
    t = make_disc()
    f, g = mutually_unbiased_pair(t, 1.0)
    gamma_bound = entropic_pur_bound(max_statistics_sum(f, g))
    for j in sample_feasible_joints(f, g, 5, seed=1):
        sigma, rep = theorem_witness_state(j, f, g, 0.3, 0.3)
        assert rep["errorbar_slack_f"] >= -1e-9
        assert rep["errorbar_slack_g"] >= -1e-9
        assert rep["dinf_slack"] >= -1e-9
        assert rep["entropic_sum"] >= gamma_bound - 1e-9


def test_witness_state_epsilon_budget():
    t = make_disc()
    f, g = mutually_unbiased_pair(t, 1.0)
    j = sample_feasible_joints(f, g, 1, seed=0)[0]
    with pytest.raises(ValueError):
        theorem_witness_state(j, f, g, 0.7, 0.7)

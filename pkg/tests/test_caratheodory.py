import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nodimhelly import (ContractError, EuclideanZeta, InputError, PreconditionError, RadiusSequence,
                        SpaceSpec, caratheodory_error_curve, greedy_caratheodory, helly_radii)
from nodimhelly.caratheodory import error_curve_csv, step_margins, zero_in_hull
from nodimhelly.sequences import CARATHEODORY_R

E2 = SpaceSpec.euclidean(2)


def random_S(rng, n, d, p):
    """n points in the l_p unit ball whose hull contains 0."""
    S = rng.standard_normal((n, d))
    S -= S.mean(axis=0)
    S /= np.max(np.sum(np.abs(S) ** p, axis=1) ** (1 / p))
    return S


def brute_force_max_norms(S, K):
    """Largest |a_k| over every path that picks a nonpositive <s, a_k> (any s when a_k = 0)."""
    best = np.zeros(K)

    def walk(a, k):
        n = np.linalg.norm(a)
        best[k - 1] = max(best[k - 1], n)
        if k == K:
            return
        for s in S:
            if n < 1e-12 or s @ a <= 1e-12:
                walk(a + s, k + 1)

    walk(S[0].copy(), 1)
    return best


def test_two_point_set():
    S = np.array([[1.0, 0.0], [-1.0, 0.0]])
    run = greedy_caratheodory(E2, S, 6)
    np.testing.assert_array_equal(run.partial_norms, [1, 0, 1, 0, 1, 0])
    np.testing.assert_array_equal(run.chosen_indices, [0, 1, 0, 1, 0, 1])
    assert np.all(run.partial_norms <= 1.0) and np.all(run.bounds() >= 1.0)
    curve = caratheodory_error_curve(run)
    k = np.arange(1, 7)
    np.testing.assert_allclose(curve[:, 1], np.where(k % 2 == 1, 1 / k, 0.0))
    assert np.all(curve[:, 1] <= curve[:, 2])


def test_three_directions_against_brute_force():
    S = np.array([[math.cos(t), math.sin(t)] for t in np.radians([0, 120, 240])])
    run = greedy_caratheodory(E2, S, 9)
    oracle = brute_force_max_norms(S, 9)
    assert oracle.max() == pytest.approx(1.0, abs=1e-12)
    assert np.all(run.partial_norms <= oracle + 1e-12)
    assert np.all(run.partial_norms <= math.sqrt(3))
    assert np.all(run.partial_norms[2:] < run.bounds()[2:])


def test_zero_set():
    for sp in (E2, SpaceSpec.lp(3, 2)):
        run = greedy_caratheodory(sp, np.zeros((1, 2)), 5)
        np.testing.assert_array_equal(run.partial_norms, np.zeros(5))
        assert np.all(np.isnan(run.inner_products))


def test_single_step():
    run = greedy_caratheodory(E2, np.array([[0.6, 0.8], [-0.6, -0.8]]), 1)
    assert run.K == 1 and run.partial_norms[0] == pytest.approx(1.0)
    assert caratheodory_error_curve(run).tolist() == [[1.0, run.partial_norms[0], 1.0]]


def test_preconditions():
    with pytest.raises(PreconditionError):
        greedy_caratheodory(E2, np.array([[1.0, 0.0], [0.5, 0.5]]), 3)
    with pytest.raises(PreconditionError):
        greedy_caratheodory(E2, np.array([[2.0, 0.0], [-2.0, 0.0]]), 3)
    with pytest.raises(InputError):
        greedy_caratheodory(E2, np.array([[1.0, 0.0, 0.0]]), 3)
    with pytest.raises(InputError):
        greedy_caratheodory(E2, np.array([[1.0, 0.0], [-1.0, 0.0]]), 3, helly_radii(E2, 3))
    with pytest.raises(InputError):
        greedy_caratheodory(SpaceSpec.lp(1, 2), np.array([[1.0, 0.0], [-1.0, 0.0]]), 3)


def test_bound_violation_raises_contract_error():
    # a deliberately wrong bound sequence must trip the certificate
    S = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]) / math.sqrt(2)
    fake = RadiusSequence(np.full(10, 0.5), CARATHEODORY_R, "callable", 1e-12)
    with pytest.raises(ContractError) as err:
        greedy_caratheodory(E2, S, 10, fake)
    assert err.value.payload.K == 10


def test_zero_in_hull():
    assert zero_in_hull([[1, 0], [-1, 0]])
    assert not zero_in_hull([[1, 0], [0.5, 1]])


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 8), st.integers(2, 30))
def test_euclidean_runs(seed, d, n):
    rng = np.random.default_rng(seed)
    S = random_S(rng, n, d, 2.0)
    run = greedy_caratheodory(SpaceSpec.euclidean(d), S, 60)
    assert np.all(run.partial_norms <= run.bounds() + 1e-8)
    live = ~np.isnan(run.inner_products)
    assert np.all(run.inner_products[live] <= 1e-9)
    m = step_margins(run, EuclideanZeta())
    assert np.nanmin(m) >= -1e-8


@settings(max_examples=10)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([1.5, 3.0]))
def test_lp_runs(seed, p):
    rng = np.random.default_rng(seed)
    S = random_S(rng, 12, 3, p)
    run = greedy_caratheodory(SpaceSpec.lp(p, 3), S, 40)
    assert np.all(run.partial_norms <= run.bounds() + 1e-8)
    m = step_margins(run, run.bound.zeta)
    assert np.nanmin(m) >= -1e-3


def test_error_curve_envelope_and_csv():
    rng = np.random.default_rng(8)
    S = random_S(rng, 50, 8, 2.0)
    run = greedy_caratheodory(SpaceSpec.euclidean(8), S, 200)
    curve = caratheodory_error_curve(run)
    k = curve[:, 0]
    assert np.max(curve[:, 1] * np.sqrt(k)) <= 4 * math.e ** 2
    text = error_curve_csv(run)
    assert text.splitlines()[0] == "k,mean_norm,bound_over_k"
    assert len(text.splitlines()) == 201
    d = run.to_dict()
    assert d["K"] == 200 and len(d["inner_products"]) == 199

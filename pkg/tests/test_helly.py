import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nodimhelly import (Ball, Certificate, ContractError, EuclideanZeta, Halfspace, Hull, InputError,
                        Rk_sequence, SpaceSpec, Witness, centerpoint, colorful_search,
                        fractional_verify, helly_radii, helly_search, intersects_ball,
                        verify_outcome)
from nodimhelly.helly import beta_from_alpha

from _oracles import halfspace_dist, wedge_halfspaces

E2 = SpaceSpec.euclidean(2)
R2 = math.sqrt((math.sqrt(5) - 1) / 2)
seeds = st.integers(0, 2 ** 32 - 1)


def hs(a, b):
    return Halfspace(np.asarray(a, dtype=float), float(b))


def wedge(angles, offset=0.5):
    return [Halfspace(a, b) for a, b in wedge_halfspaces(angles, offset)]


def oracle_dists(family, x, p=2.0):
    return np.array([halfspace_dist(s.a, s.b, x, p) for s in family])


def test_k1_witness_at_origin(euclid_r):
    family = [hs([1, 0], 0.5), hs([0, -1], 0.9), Ball(np.array([1.5, 0.0]), 0.6)]
    out = helly_search(E2, family, 1, euclid_r)
    assert isinstance(out, Witness)
    np.testing.assert_array_equal(out.x, [0, 0])
    assert np.all(out.per_set_dist <= 1.0 + 1e-12)


def test_near_halfspaces_give_witness(euclid_r):
    # {x1 >= 0.5} and {x1 <= -0.5} are disjoint but both lie within r_2 of 0
    family = [hs([-1, 0], -0.5), hs([1, 0], -0.5)]
    out = helly_search(E2, family, 2, euclid_r)
    assert isinstance(out, Witness)
    np.testing.assert_allclose(out.per_set_dist, [0.5, 0.5])


def test_far_disjoint_halfspaces_give_certificate(euclid_r):
    family = [hs([-1, 0], -2.0), hs([1, 0], -2.0)]
    out = helly_search(E2, family, 2, euclid_r)
    assert isinstance(out, Certificate)
    assert sorted(out.indices) == [0, 1]
    assert out.empty and out.dist_lower_bound == math.inf
    assert verify_outcome(E2, family, out)


def test_wedge_triple(euclid_r):
    family = wedge([0, 120, 240])
    # every pair meets the unit ball exactly on its boundary
    for i, j in itertools.combinations(range(3), 2):
        test = intersects_ball(E2, [family[i], family[j]], Ball(np.zeros(2), 1.0))
        assert test.meets and test.result.dist == pytest.approx(1.0, abs=1e-8)
    out = helly_search(E2, family, 2, euclid_r)
    assert isinstance(out, Witness)
    assert out.radius == pytest.approx(R2, abs=1e-12)
    assert np.all(oracle_dists(family, out.x) <= R2 + 1e-9)
    np.testing.assert_allclose(oracle_dists(family, np.zeros(2)), [0.5] * 3, atol=1e-15)


def test_helly_errors(euclid_r):
    family = wedge([0, 120])
    with pytest.raises(InputError):
        helly_search(E2, family, 3, euclid_r)
    with pytest.raises(InputError):
        helly_search(E2, family, 0, euclid_r)
    with pytest.raises(InputError):
        helly_search(E2, [], 1, euclid_r)
    with pytest.raises(InputError):
        helly_search(E2, family, 2, Rk_sequence(EuclideanZeta(), 3))
    with pytest.raises(InputError):
        helly_search(SpaceSpec.euclidean(3), family, 2, euclid_r)


def test_colorful_examples(euclid_r):
    fam = [hs([1, 0], 0.5), Ball(np.array([0.0, 1.2]), 0.5)]
    out = colorful_search(E2, [fam], euclid_r)
    assert isinstance(out, Witness) and out.color == 0
    np.testing.assert_array_equal(out.x, [0, 0])

    out = colorful_search(E2, [[hs([-1, 0], -2)], [hs([1, 0], -2)]], euclid_r)
    assert isinstance(out, Certificate) and out.empty
    assert out.indices == [(0, 0), (1, 0)]
    assert verify_outcome(E2, [[hs([-1, 0], -2)], [hs([1, 0], -2)]], out, colorful=True)

    F1, F2 = wedge([0, 120]), wedge([240])
    unit = Ball(np.zeros(2), 1.0)
    for a, b in itertools.product(F1, F2):
        assert intersects_ball(E2, [a, b], unit).meets
    out = colorful_search(E2, [F1, F2], euclid_r)
    assert isinstance(out, Witness)
    chosen = [F1, F2][out.color]
    assert np.all(oracle_dists(chosen, out.x) <= R2 + 1e-9)
    assert verify_outcome(E2, [F1, F2], out, colorful=True)


def _common_point_family(rng, d, n, p=2.0):
    """Halfspaces and balls that all contain a common point of the unit ball."""
    c = rng.standard_normal(d)
    c *= rng.uniform(0, 1) / np.linalg.norm(c)
    fam = []
    for _ in range(n):
        if rng.uniform() < 0.7:
            a = rng.standard_normal(d)
            fam.append(Halfspace(a, float(a @ c) + float(rng.uniform(0, 0.5)) * np.linalg.norm(a)))
        else:
            ctr = c + rng.standard_normal(d)
            fam.append(Ball(ctr, float(np.linalg.norm(ctr - c)) * float(rng.uniform(1.0, 1.5))
                            + 1e-3))
    return fam


@settings(max_examples=30)
@given(seeds, st.integers(2, 5), st.integers(2, 10), st.integers(1, 4))
def test_witness_soundness(seed, d, n, k):
    rng = np.random.default_rng(seed)
    k = min(k, n)
    family = [Halfspace(rng.standard_normal(d), float(rng.uniform(-1.5, 0.5))) for _ in range(n)]
    rseq = helly_radii(SpaceSpec.euclidean(d), k)
    out = helly_search(SpaceSpec.euclidean(d), family, k, rseq)
    assert verify_outcome(SpaceSpec.euclidean(d), family, out)
    if isinstance(out, Witness):
        assert np.all(oracle_dists(family, out.x) <= rseq[k] + 2e-9)
    else:
        assert len(out.indices) <= k and len(set(out.indices)) == len(out.indices)
        sets = [family[i] for i in out.indices]
        assert intersects_ball(SpaceSpec.euclidean(d), sets, Ball(np.zeros(d), 1.0)).meets is False


@settings(max_examples=30)
@given(seeds, st.integers(2, 5), st.integers(2, 10), st.integers(2, 4))
def test_good_tuple_growth(seed, d, n, k):
    rng = np.random.default_rng(seed)
    k = min(k, n)
    family = [Halfspace(rng.standard_normal(d), float(rng.uniform(-1.5, 0.0))) for _ in range(n)]
    sp = SpaceSpec.euclidean(d)
    rseq = helly_radii(sp, k)
    out = helly_search(sp, family, k, rseq)
    for entry in out.trace:
        j = entry["j"]
        # scaled distance of the j-th nearest point beats 1/r_j relative to r_k
        assert entry["scaled_dist"] > rseq[k] / rseq[j] * (1 - 1e-9)


@settings(max_examples=20)
@given(seeds, st.integers(2, 4), st.integers(2, 8), st.integers(1, 3))
def test_completeness_on_common_point_families(seed, d, n, k):
    rng = np.random.default_rng(seed)
    k = min(k, n)
    family = _common_point_family(rng, d, n)
    sp = SpaceSpec.euclidean(d)
    out = helly_search(sp, family, k, helly_radii(sp, k))
    assert isinstance(out, Witness)
    assert verify_outcome(sp, family, out)


@settings(max_examples=15)
@given(seeds, st.integers(2, 3), st.integers(2, 6), st.sampled_from([1.5, 3.0]))
def test_lp_engine_soundness(seed, d, n, p):
    rng = np.random.default_rng(seed)
    sp = SpaceSpec.lp(p, d)
    family = [Halfspace(rng.standard_normal(d), float(rng.uniform(-1.5, 0.5))) for _ in range(n)]
    rseq = helly_radii(sp, 2)
    out = helly_search(sp, family, 2, rseq)
    assert verify_outcome(sp, family, out)
    if isinstance(out, Witness):
        assert np.all(oracle_dists(family, out.x, p) <= rseq[2] * (1 + 2e-9))


@settings(max_examples=20)
@given(seeds, st.integers(2, 4), st.integers(2, 6), st.integers(1, 3))
def test_colorful_with_equal_families_meets_monochrome_contract(seed, d, n, k):
    rng = np.random.default_rng(seed)
    sp = SpaceSpec.euclidean(d)
    family = [Halfspace(rng.standard_normal(d), float(rng.uniform(-1.0, 0.5))) for _ in range(n)]
    rseq = helly_radii(sp, k)
    out = colorful_search(sp, [family] * k, rseq)
    assert verify_outcome(sp, [family] * k, out, colorful=True)
    if isinstance(out, Witness):
        assert verify_outcome(sp, family, Witness(out.x, out.per_set_dist, out.radius, k))


def test_fractional_example(euclid_r):
    family = [hs([-1, 0], -2)] + [hs([1, 0], 0)] * 9
    rep = fractional_verify(E2, family, 2, None, euclid_r)
    assert rep.alpha_empirical == pytest.approx(math.comb(9, 2) / math.comb(10, 2))
    assert rep.alpha_empirical == pytest.approx(0.8)
    assert rep.beta_empirical == pytest.approx(1 - math.sqrt(0.2), abs=1e-15)
    assert rep.covered_fraction == pytest.approx(0.9)
    np.testing.assert_array_equal(rep.best_center, [0, 0])
    assert rep.clears_beta and not rep.sampled and rep.tuples_checked == 45


def test_fractional_alpha_one_and_k1(euclid_r):
    family = wedge([0, 120, 240])
    rep = fractional_verify(E2, family, 2, 1.0, euclid_r)
    assert rep.alpha_empirical == 1.0 and rep.beta_target == 1.0
    assert rep.covered_fraction == 1.0
    family = [hs([1, 0], 0.5), hs([-1, 0], -3), hs([0, 1], -0.2), hs([0, -1], -4)]
    rep = fractional_verify(E2, family, 1, 0.5, euclid_r)
    assert rep.alpha_empirical == 0.5
    assert rep.beta_target == 0.5 and rep.beta_empirical == 0.5
    assert rep.covered_fraction >= 0.5


def test_fractional_colorful_and_sampling(euclid_r):
    F1, F2 = wedge([0, 120]), wedge([240]) + [hs([1, 0], -3)]
    rep = fractional_verify(E2, [F1, F2], 2, None, euclid_r, colorful=True)
    assert rep.best_color is not None and rep.clears_beta
    assert rep.tuples_checked == 4
    family = wedge(range(0, 360, 30))
    rep = fractional_verify(E2, family, 3, None, euclid_r, tuple_budget=50, seed=4)
    assert rep.sampled and rep.tuples_checked == 50
    with pytest.raises(InputError):
        fractional_verify(E2, family, 3, 1.5, euclid_r)


def test_beta_formula():
    assert beta_from_alpha(0.8, 2) == pytest.approx(1 - math.sqrt(0.2))
    assert beta_from_alpha(0.3, 1) == pytest.approx(0.3)
    assert beta_from_alpha(1.0, 5) == 1.0


def test_centerpoint_cross(euclid_r):
    P = np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1]])
    # each triangle of three of the points contains the origin
    for tri in itertools.combinations(range(4), 3):
        pts = P[list(tri)]
        assert any(np.allclose(pts[i] + pts[j], 0) for i, j in itertools.combinations(range(3), 2))
    res = centerpoint(E2, P, 2, euclid_r)
    assert res.subset_size == 3 and res.family_size == 4
    assert res.passed and res.min_halfspace_count >= 2
    assert np.all([np.linalg.norm(res.x - 0) <= R2 + 1e-9])


def test_centerpoint_degenerate_cases(euclid_r):
    P = np.array([[0.3, 0.1], [-0.2, 0.5], [0.1, -0.7]])
    res = centerpoint(E2, P, 3, euclid_r)
    assert res.passed and res.required == 1
    y = np.array([0.2, -0.4])
    res = centerpoint(E2, np.tile(y, (5, 1)), 2, euclid_r)
    assert np.linalg.norm(res.x - y) <= euclid_r[2] + 1e-9
    assert res.min_halfspace_count == 5
    with pytest.raises(InputError):
        centerpoint(SpaceSpec.lp(3, 2), P, 2, euclid_r)
    with pytest.raises(InputError):
        centerpoint(E2, np.zeros((15, 2)), 2, euclid_r)
    with pytest.raises(InputError):
        centerpoint(E2, [[2.0, 0.0]], 1, euclid_r)


def test_outcome_serialization(euclid_r):
    out = helly_search(E2, [hs([-1, 0], -2.0), hs([1, 0], -2.0)], 2, euclid_r)
    d = out.to_dict()
    assert d["kind"] == "certificate" and d["indices"] == [0, 1]
    out = helly_search(E2, wedge([0, 120, 240]), 2, euclid_r)
    d = out.to_dict()
    assert d["kind"] == "witness" and len(d["per_set_dist"]) == 3


def test_contract_error_carries_payload():
    err = ContractError("boom", {"a": 1})
    assert err.payload == {"a": 1}

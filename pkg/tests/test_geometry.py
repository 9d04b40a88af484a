import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nodimhelly import (Ball, Halfspace, Hull, InputError, Polytope, SpaceSpec, contains, distance,
                        intersects_ball, nearest_point, nearest_point_intersection)
from nodimhelly.geometry import Tolerances

from _oracles import conj, cvx_project, halfspace_dist, lp_norm, wedge_halfspaces

E2 = SpaceSpec.euclidean(2)
UNIT2 = Ball(np.zeros(2), 1.0)
seeds = st.integers(0, 2 ** 32 - 1)


def wedge(angles=(0, 120), offset=0.5):
    return [Halfspace(a, b) for a, b in wedge_halfspaces(angles, offset)]


def test_contains_examples():
    assert contains(E2, Halfspace(np.array([1.0, 0.0]), 0.0), [-1, 0])
    assert contains(E2, UNIT2, [1, 0])
    assert contains(E2, Hull(np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])), [0, 0])
    assert not contains(E2, UNIT2, [1, 1e-3])
    poly = Polytope((Halfspace(np.array([1.0, 0.0]), 1.0), Halfspace(np.array([0.0, 1.0]), 1.0)))
    assert contains(E2, poly, [1, 1]) and not contains(E2, poly, [1.1, 0])


def test_nearest_point_examples():
    r = nearest_point(E2, Halfspace(np.array([1.0, 0.0]), -0.5), [0, 0])
    np.testing.assert_allclose(r.point, [-0.5, 0], atol=1e-15)
    assert r.dist == 0.5 and r.converged
    r = nearest_point(E2, Ball(np.array([3.0, 4.0]), 1.0), [0, 0])
    np.testing.assert_allclose(r.point, [2.4, 3.2], atol=1e-15)
    assert r.dist == pytest.approx(4.0, abs=1e-15)
    l3 = SpaceSpec.lp(3, 2)
    h = Halfspace(np.array([-1.0, -1.0]), -1.0)
    oracle = 1.0 / lp_norm([1, 1], 1.5)
    assert oracle == pytest.approx(2 ** (-2 / 3), rel=1e-15)
    assert nearest_point(l3, h, [0, 0]).dist == pytest.approx(oracle, abs=1e-12)
    # the same halfspace through the iterative solver
    big = Ball(np.zeros(2), 50.0)
    r = nearest_point_intersection(l3, [h, big], [0, 0])
    assert r.converged and r.dist == pytest.approx(oracle, abs=1e-6)


def test_intersection_examples():
    quad = [Halfspace(np.array([-1.0, 0.0]), -0.5), Halfspace(np.array([0.0, -1.0]), -0.5)]
    r = nearest_point_intersection(E2, quad, [0, 0])
    np.testing.assert_allclose(r.point, [0.5, 0.5], atol=1e-8)
    assert r.dist == pytest.approx(math.sqrt(0.5), abs=1e-8)
    disjoint = [Halfspace(np.array([-1.0, 0.0]), -0.5), Halfspace(np.array([1.0, 0.0]), -0.5)]
    r = nearest_point_intersection(E2, disjoint, [0, 0])
    assert r.infeasible and not r.converged and r.dist == math.inf
    r = nearest_point_intersection(E2, wedge(), [0, 0])
    assert r.dist == pytest.approx(0.5 / math.cos(math.radians(60)), abs=1e-8)
    np.testing.assert_allclose(r.point, [math.cos(math.radians(60)), math.sin(math.radians(60))],
                               atol=1e-8)
    with pytest.raises(InputError):
        nearest_point_intersection(E2, [], [0, 0])


@pytest.mark.parametrize("p", [1.0, 1.5, 3.0, math.inf])
def test_disjoint_is_infeasible_in_every_norm(p):
    sp = SpaceSpec.lp(p, 2)
    disjoint = [Halfspace(np.array([-1.0, 0.0]), -0.5), Halfspace(np.array([1.0, 0.0]), -0.5)]
    r = nearest_point_intersection(sp, disjoint, [0, 0])
    assert r.infeasible
    assert intersects_ball(sp, disjoint, UNIT2).meets is False


def test_intersects_ball_examples():
    meets, w = intersects_ball(E2, [Halfspace(np.array([-1.0, 0.0]), 0.0)], UNIT2)
    assert meets and np.linalg.norm(w) <= 1 + 1e-9 and w[0] >= -1e-9
    meets, w = intersects_ball(E2, [Halfspace(np.array([-1.0, 0.0]), -2.0)], UNIT2)
    assert meets is False and w is None
    test = intersects_ball(E2, wedge(), UNIT2)
    assert test.meets
    assert test.result.dist == pytest.approx(1.0, abs=1e-8)
    # just inside / just outside the boundary case
    assert intersects_ball(E2, wedge(offset=0.5 - 1e-6), UNIT2).meets
    assert intersects_ball(E2, wedge(offset=0.5 + 1e-6), UNIT2).meets is False


def _random_euclid_instance(rng, d, with_hull=True):
    """Sets that all contain the ball of radius 0.3 around c."""
    c = rng.standard_normal(d) * 0.5
    sets, oracle = [], []
    for _ in range(int(rng.integers(1, 4))):
        a = rng.standard_normal(d)
        b = float(a @ c) + 0.3 * np.linalg.norm(a) + float(rng.uniform(0, 0.5))
        sets.append(Halfspace(a, b))
        oracle.append(("halfspace", a, b))
    if rng.uniform() < 0.5:
        ctr = c + rng.standard_normal(d) * 0.2
        r = float(np.linalg.norm(ctr - c)) + 0.3 + float(rng.uniform(0, 0.5))
        sets.append(Ball(ctr, r))
        oracle.append(("ball", ctr, r))
    if with_hull and rng.uniform() < 0.5:
        # cross-polytope with inradius 0.6, so the jittered hull still holds the 0.3-ball
        P = c + 0.6 * np.vstack([np.eye(d), -np.eye(d)]) * math.sqrt(d)
        P = P + rng.standard_normal(P.shape) * 0.05
        sets.append(Hull(P))
        oracle.append(("hull", P))
    return c, sets, oracle


@settings(max_examples=40)
@given(seeds, st.integers(2, 5))
def test_euclidean_projection_matches_cvxpy(seed, d):
    rng = np.random.default_rng(seed)
    c, sets, oracle = _random_euclid_instance(rng, d)
    x0 = rng.standard_normal(d) * 3
    res = nearest_point_intersection(SpaceSpec.euclidean(d), sets, x0)
    assert res.converged
    _, dist = cvx_project(2, oracle, x0)
    assert res.dist == pytest.approx(dist, abs=1e-7)
    for s in sets:
        assert contains(SpaceSpec.euclidean(d), s, res.point, 1e-7)


@settings(max_examples=25)
@given(seeds, st.integers(2, 4), st.sampled_from([1.0, 1.5, 3.0, math.inf]))
def test_lp_projection_matches_cvxpy(seed, d, p):
    rng = np.random.default_rng(seed)
    c, sets, oracle = _random_euclid_instance(rng, d)
    x0 = rng.standard_normal(d) * 3
    res = nearest_point_intersection(SpaceSpec.lp(p, d), sets, x0)
    assert res.converged
    _, dist = cvx_project(p, oracle, x0)
    assert res.dist == pytest.approx(dist, abs=1e-6)


@settings(max_examples=40)
@given(seeds, st.integers(2, 5))
def test_variational_inequality(seed, d):
    rng = np.random.default_rng(seed)
    c, sets, _ = _random_euclid_instance(rng, d)
    x0 = rng.standard_normal(d) * 3
    res = nearest_point_intersection(SpaceSpec.euclidean(d), sets, x0)
    assert res.converged
    pt = res.point
    u = rng.standard_normal((100, d))
    u *= (0.3 * rng.uniform(0, 1, 100) ** (1 / d) / np.linalg.norm(u, axis=1))[:, None]
    ys = c + u
    ys[50:] = pt + rng.uniform(0, 1, (50, 1)) * (ys[50:] - pt)
    assert np.max((ys - pt) @ (x0 - pt)) <= 1e-8


@settings(max_examples=25)
@given(seeds, st.integers(2, 4), st.floats(1.5, 3.0))
def test_uniqueness_from_different_warm_starts(seed, d, p):
    rng = np.random.default_rng(seed)
    _, sets, _ = _random_euclid_instance(rng, d, with_hull=rng.uniform() < 0.5)
    if len(sets) == 1:
        sets.append(Ball(np.zeros(d), 100.0))
    sp = SpaceSpec.lp(p, d)
    x0 = rng.standard_normal(d) * 3
    a = nearest_point_intersection(sp, sets, x0, warm_start=rng.standard_normal(d) * 5)
    b = nearest_point_intersection(sp, sets, x0, warm_start=rng.standard_normal(d) * 5)
    assert a.converged and b.converged
    assert lp_norm(a.point - b.point, p) <= 1e-6


@settings(max_examples=30)
@given(seeds, st.integers(2, 5), st.sampled_from([1.5, 2.0, 3.0]))
def test_single_set_agreement(seed, d, p):
    rng = np.random.default_rng(seed)
    sp = SpaceSpec.euclidean(d) if p == 2.0 else SpaceSpec.lp(p, d)
    x0 = rng.standard_normal(d) * 2
    P = rng.standard_normal((d + 2, d))
    for s in (Hull(P), Ball(rng.standard_normal(d), 0.7),
              Polytope(tuple(Halfspace(rng.standard_normal(d), 0.2) for _ in range(3)))):
        one = nearest_point_intersection(sp, [s], x0)
        ref = nearest_point(sp, s, x0)
        assert one.dist == pytest.approx(ref.dist, abs=1e-8)
    if p == 2.0:
        # a redundant extra constraint does not move the Euclidean projection
        redundant = Ball(np.zeros(d), 1e3)
        two = nearest_point_intersection(sp, [Hull(P), redundant], x0)
        assert two.dist == pytest.approx(nearest_point(sp, Hull(P), x0).dist, abs=1e-8)


@given(seeds, st.integers(1, 6), st.sampled_from([1.0, 1.5, 2.0, 3.0, 7.0, math.inf]))
def test_halfspace_distance_closed_form(seed, d, p):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(d)
    b = float(rng.standard_normal())
    x = rng.standard_normal(d) * 3
    sp = SpaceSpec.lp(p, d)
    h = Halfspace(a, b)
    assert distance(sp, h, x) == pytest.approx(halfspace_dist(a, b, x, p), abs=1e-8)
    r = nearest_point(sp, h, x)
    assert lp_norm(x - r.point, p) == pytest.approx(r.dist, abs=1e-12)
    assert float(a @ r.point) <= b + 1e-9 * (1 + abs(b))
    if p == 2.0:
        e = SpaceSpec.euclidean(d)
        assert distance(e, h, x) == pytest.approx(halfspace_dist(a, b, x, 2.0), abs=1e-8)


def test_nonconvergence_is_flagged():
    # an iteration cap too small to converge must be reported, not hidden
    sets = [Ball(np.array([1.0, 0.0]), 1.0), Ball(np.array([-1.0, 0.0]), 1.0 + 1e-3)]
    r = nearest_point_intersection(E2, sets, [0.0, 5.0], Tolerances(1e-12, 3))
    assert not r.converged or r.residual <= 1e-12
    d = r.to_dict()
    assert set(d) >= {"point", "dist", "converged", "iterations", "residual", "infeasible"}

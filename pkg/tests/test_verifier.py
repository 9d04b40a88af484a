import math

import numpy as np
import pytest

from nodimhelly import (Halfspace, InputError, SpaceSpec, check_max_deviation,
                        check_min_deviation_lemma, check_sequence_corollary,
                        check_supporting_deviation, nearest_point_intersection, run_selfcheck)
from nodimhelly.verifier import suite_spaces

E2 = SpaceSpec.euclidean(2)


def hs(a, b):
    return Halfspace(np.asarray(a, dtype=float), float(b))


def test_supporting_deviation_examples():
    # with x = e1 the supporting line is x1 = 1 and its points at distance 1 are (1, +-1)
    assert math.hypot(1, 1) == pytest.approx(math.sqrt(2))
    rep = check_supporting_deviation(E2, trials=50, rho=1.0)
    assert rep.passed and rep.worst_margin >= -1e-6
    rep = check_supporting_deviation(SpaceSpec.lp(3, 2), trials=500)
    assert rep.worst_margin >= -1e-4 and rep.trials == 500
    with pytest.raises(InputError):
        check_supporting_deviation(SpaceSpec.euclidean(3))


def test_min_deviation_examples():
    # orthogonal halfspaces at distance 1 each: the corner sits at sqrt(1 + 1)
    K, L = hs([-1, 0], -1), hs([0, -1], -1)
    r = nearest_point_intersection(E2, [K, L], [0, 0])
    assert r.dist == pytest.approx(math.sqrt(2), abs=1e-9)
    # rho_L = 0: the bound is dist(x, K) itself
    r0 = nearest_point_intersection(E2, [K, hs([0, -1], 0.0)], [0, 0])
    assert r0.dist >= 1.0 - 1e-12
    rep = check_min_deviation_lemma(SpaceSpec.lp(1.5, 3), trials=300)
    assert rep.worst_margin >= -1e-3 and rep.passed


def test_sequence_corollary_examples(euclid_r):
    eps = 1e-3
    K = hs([-1, 0], -(1 + eps))
    L = hs([0, -1], -(1 + eps))  # dist(p, L) > 1 for p = (1 + eps) e1
    r = nearest_point_intersection(E2, [K, L], [0, 0])
    assert 1 / euclid_r[2] == pytest.approx(1.2720196495140689, rel=1e-15)
    assert r.dist > 1 / euclid_r[2]
    rep = check_sequence_corollary(SpaceSpec.lp(3, 2), trials=200)
    assert rep.worst_margin >= -1e-3 and rep.passed
    with pytest.raises(InputError):
        from nodimhelly import EuclideanZeta, Rk_sequence
        check_sequence_corollary(E2, Rk_sequence(EuclideanZeta(), 13))


def test_max_deviation_examples():
    x = np.array([0.6, 0.8])
    z = np.array([-0.8, 0.6])
    assert np.linalg.norm(x + z) == pytest.approx(math.sqrt(2) * np.linalg.norm(x))
    assert np.linalg.norm(x - x) == 0.0
    rep = check_max_deviation(SpaceSpec.lp(1.5, 4), trials=300)
    assert rep.worst_margin >= -1e-3 and rep.passed
    rep = check_max_deviation(SpaceSpec.euclidean(3), trials=300)
    assert rep.worst_margin >= -1e-9


def test_reports_reproducible_and_thread_independent():
    sp = SpaceSpec.lp(1.5, 2)
    a = check_min_deviation_lemma(sp, trials=40, seed=9, slack=-1.0)
    b = check_min_deviation_lemma(sp, trials=40, seed=9, slack=-1.0, threads=4)
    # a negative slack records most trials as counterexamples
    assert len(a.failures) >= 20
    assert a.to_dict() == b.to_dict()
    c = check_min_deviation_lemma(sp, trials=40, seed=10, slack=-1.0)
    assert c.to_dict() != a.to_dict()


def test_failure_payloads_are_machine_readable():
    rep = check_max_deviation(E2, trials=6, slack=-10.0)
    assert len(rep.failures) == 6
    for f in rep.failures:
        assert {"x", "z", "lhs", "rhs", "trial", "margin"} <= set(f)


def test_full_suite_default_budget():
    reports = run_selfcheck()
    assert len(reports) == 3 * 3 * 3 + 3
    assert all(r.passed for r in reports), [r.to_dict() for r in reports if not r.passed]
    assert {(s.p, s.dim) for s in suite_spaces()} == {(p, d) for p in (1.5, 2.0, 3.0)
                                                       for d in (2, 3, 4)}

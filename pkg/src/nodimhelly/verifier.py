"""Sampling-based self-checks of the geometric lemmas behind the engines.

Each check draws random configurations satisfying a lemma's hypotheses and
records the margin by which its conclusion holds. Negative margins beyond the
slack become failures with a machine-readable payload. Trials use seeds
derived from ``(seed, check tag, trial index)``, so a report is reproducible
regardless of thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InputError
from .geometry import nearest_point_intersection
from .moduli import DEFAULT_BUDGET, Budget
from .sequences import (HELLY_R, EuclideanZeta, PiecewiseLinearZeta, RadiusSequence,
                        helly_radii)
from .moduli import modulus_table
from .sets import Halfspace
from .space import SpaceSpec, duality_map, pnorm

_TAG_SUPPORT, _TAG_MINDEV, _TAG_SEQ, _TAG_MAXDEV = 101, 102, 103, 104

EXACT_SLACK = 1e-6
ESTIMATED_SLACK = 1e-3


@dataclass
class CheckReport:
    name: str
    trials: int
    worst_margin: float
    failures: list
    seed: int
    slack: float
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"name": self.name, "trials": self.trials, "worst_margin": self.worst_margin,
                "slack": self.slack, "seed": self.seed, "passed": self.passed,
                "params": self.params, "failures": self.failures}


def _trial_rng(seed, tag, i):
    return np.random.default_rng([seed, tag, i])


def _run(fn, trials, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(fn, range(trials)))
    return [fn(i) for i in range(trials)]


def _report(name, results, seed, slack, params):
    margins = [m for m, _ in results]
    failures = [dict(payload, trial=i, margin=m)
                for i, (m, payload) in enumerate(results) if m < -slack]
    worst = float(min(margins)) if margins else math.inf
    return CheckReport(name, len(results), worst, failures, seed, slack, params)


def _random_unit(rng, d, p):
    v = rng.standard_normal(d)
    return v / pnorm(v, p)


def _uc_space(space):
    space.require_uniformly_convex()


# --- estimated hypotenuse functions, cached per space -------------------------

@lru_cache(maxsize=32)
def _zeta_minus_wide(space: SpaceSpec, budget: Budget):
    if space.is_euclidean:
        return EuclideanZeta()
    grid = np.linspace(0.0, 4.0, 81)
    table = modulus_table(space, grid, budget, columns=("zeta_minus",))
    return PiecewiseLinearZeta.from_table(table, "minus")


@lru_cache(maxsize=32)
def _zeta_plus_wide(space: SpaceSpec, budget: Budget):
    if space.is_euclidean:
        return EuclideanZeta()
    grid = np.linspace(0.0, 4.0, 81)
    table = modulus_table(space, grid, budget, columns=("zeta_plus",))
    return PiecewiseLinearZeta.from_table(table, "plus")


@lru_cache(maxsize=32)
def _cached_radii(space: SpaceSpec, K: int, budget: Budget):
    return helly_radii(space, K, budget)


def _default_slack(space, slack):
    if slack is not None:
        return slack
    return EXACT_SLACK if space.is_euclidean else ESTIMATED_SLACK


# --- supporting hyperplane identities ------------------------------------------

def _tangent_2d(xs, p):
    t = np.array([-xs[1], xs[0]])
    return t / pnorm(t, p)


def check_supporting_deviation(space: SpaceSpec, trials: int = 500,
                               samples_per_trial: int = 256, rho: float | None = None,
                               seed: int = 0, slack: float | None = None,
                               threads: int = 1) -> CheckReport:
    """Both identities for a supporting line of the unit ball in a normed plane.

    Per trial: a random unit x, the line H through x annihilated by its
    norming functional, and rho in (0, 2] (or the given value). The infimum of
    |y| over the outer half-plane with |x - y| >= rho must not undercut the
    minimum over the two points of H at distance rho; the supremum of |z|
    over the inner half-plane with |x - z| <= rho must not exceed the maximum
    over the same two points. The margin is the smaller of the two gaps.
    """
    if space.dim != 2:
        raise InputError("check_supporting_deviation needs a two-dimensional space")
    _uc_space(space)
    p = space.p
    slack = _default_slack(space, slack)

    def trial(i):
        rng = _trial_rng(seed, _TAG_SUPPORT, i)
        x = _random_unit(rng, 2, p)
        xs = duality_map(x, p)
        t = _tangent_2d(xs, p)
        r = float(rho) if rho is not None else float(rng.uniform(1e-3, 2.0))
        on_h = pnorm(np.array([x + r * t, x - r * t]), p)
        h_min, h_max = float(on_h.min()), float(on_h.max())
        # directions v of the outer / inner half-plane, as unit vectors of the norm
        ang = rng.uniform(0.0, 2.0 * np.pi, samples_per_trial)
        V = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        V = V / pnorm(V, p)[:, None]
        side = V @ xs
        V = np.where(side[:, None] >= 0, V, -V)  # now <x*, v> >= 0
        # radii concentrated near rho, where both extrema live
        out_r = r * (1.0 + rng.exponential(0.05, samples_per_trial))
        Y = x + out_r[:, None] * V
        in_r = r * (1.0 - rng.uniform(0.0, 1.0, samples_per_trial) ** 4)
        Z = x - in_r[:, None] * V
        ny = pnorm(Y, p)
        nz = pnorm(Z, p)
        m_inf = float(ny.min() - h_min)
        m_sup = float(h_max - nz.max())
        margin = min(m_inf, m_sup)
        payload = {"x": x.tolist(), "rho": r, "h_min": h_min, "h_max": h_max,
                   "sampled_inf": float(ny.min()), "sampled_sup": float(nz.max())}
        return margin, payload

    results = _run(trial, trials, threads)
    return _report("supporting_deviation", results, seed, slack,
                   {"p": p, "dim": 2, "rho": rho, "samples_per_trial": samples_per_trial})


# --- minimal deviation lemma ------------------------------------------------------

def _halfspace_dist(a, b, x, q):
    return max(float(a @ x) - b, 0.0) / float(pnorm(a, q))


def check_min_deviation_lemma(space: SpaceSpec, trials: int = 300, seed: int = 0,
                              slack: float | None = None, budget: Budget = DEFAULT_BUDGET,
                              zeta=None, threads: int = 1) -> CheckReport:
    """dist(x, K cap L) >= rho zeta-(rho_L / rho) for random halfspaces K and L.

    x lies at distance rho from K with nearest point y, and rho_L is taken
    just below dist(y, K cap L); both intersection distances come from the
    projection solver.
    """
    _uc_space(space)
    p, d, q = space.p, space.dim, space.q
    slack = _default_slack(space, slack)
    zeta = zeta or _zeta_minus_wide(space, budget)

    def trial(i):
        rng = _trial_rng(seed, _TAG_MINDEV, i)
        a = rng.standard_normal(d)
        x = rng.standard_normal(d)
        # K = {<a, z> <= b} with x outside at distance rho
        rho = float(rng.uniform(0.2, 2.0))
        b = float(a @ x) - rho * float(pnorm(a, q))
        K = Halfspace(a, b)
        u = duality_map(a, q)  # unit vector with <a, u> = |a|_q
        y = x - rho * u
        c = rng.standard_normal(d)
        s = float(rng.uniform(0.05, 1.5)) * rho
        L = Halfspace(c, float(c @ y) - s * float(pnorm(c, q)))
        ry = nearest_point_intersection(space, [K, L], y)
        rx = nearest_point_intersection(space, [K, L], x)
        payload = {"a": a.tolist(), "b": b, "c": L.a.tolist(), "cb": L.b, "x": x.tolist(),
                   "rho": rho}
        if ry.infeasible or rx.infeasible:
            return math.inf, payload
        if not (ry.converged and rx.converged):
            payload["solver"] = "no convergence"
            return -math.inf, payload
        rho_l = ry.dist * (1.0 - 1e-12)
        bound = rho * float(zeta(rho_l / rho))
        payload.update({"rho_L": rho_l, "dist_x": rx.dist, "bound": bound})
        return rx.dist - bound, payload

    results = _run(trial, trials, threads)
    return _report("min_deviation_lemma", results, seed, slack,
                   {"p": p, "dim": d, "mode": space.mode})


# --- greedy step corollary --------------------------------------------------------

def check_sequence_corollary(space: SpaceSpec, rseq: RadiusSequence | None = None,
                             trials: int = 200, seed: int = 0, slack: float | None = None,
                             budget: Budget = DEFAULT_BUDGET, threads: int = 1) -> CheckReport:
    """dist(0, K cap L) > 1/r_j whenever |p| > 1/r_{j-1} and dist(p, L) > 1.

    p is the nearest point of a halfspace K to the origin; j is drawn from
    [2, 12]. Half the trials sit at the hypothesis boundary |p| = 1/r_{j-1} + 1e-3.
    """
    _uc_space(space)
    p_exp, d, q = space.p, space.dim, space.q
    slack = _default_slack(space, slack)
    rseq = rseq or _cached_radii(space, 13, budget)
    if rseq.kind != HELLY_R:
        raise InputError("check_sequence_corollary needs a helly_r sequence")

    def trial(i):
        rng = _trial_rng(seed, _TAG_SEQ, i)
        j = int(rng.integers(2, 13))
        r_prev, r_j = rseq[j - 1], rseq[j]
        extra = 1e-3 if i % 2 == 0 else float(rng.uniform(1e-3, 1.0))
        norm_p = 1.0 / r_prev + extra
        u = _random_unit(rng, d, p_exp)
        us = duality_map(u, p_exp)
        pt = norm_p * u
        K = Halfspace(-us, -norm_p)  # {<u*, z> >= |p|}; nearest point to 0 is pt
        c = rng.standard_normal(d)
        s = 1.0 + float(rng.uniform(1e-3, 1.0)) if i % 4 else 1.0 + 1e-3
        L = Halfspace(c, float(c @ pt) - s * float(pnorm(c, q)))
        res = nearest_point_intersection(space, [K, L], np.zeros(d))
        payload = {"j": j, "p": pt.tolist(), "L_a": c.tolist(), "L_b": L.b,
                   "target": 1.0 / r_j}
        if res.infeasible:
            return math.inf, payload
        if not res.converged:
            payload["solver"] = "no convergence"
            return -math.inf, payload
        payload["dist"] = res.dist
        return res.dist - 1.0 / r_j, payload

    results = _run(trial, trials, threads)
    return _report("sequence_corollary", results, seed, slack,
                   {"p": p_exp, "dim": d, "mode": space.mode, "zeta_source": rseq.zeta_source})


# --- maximal deviation corollary ------------------------------------------------

def check_max_deviation(space: SpaceSpec, trials: int = 300, seed: int = 0,
                        slack: float | None = None, budget: Budget = DEFAULT_BUDGET,
                        zeta_plus=None, threads: int = 1) -> CheckReport:
    """|x + z| <= |x| zeta+(|z| / |x|) for z in the half-space {<x*, z> <= 0}."""
    _uc_space(space)
    p, d = space.p, space.dim
    slack = _default_slack(space, slack)
    zeta_plus = zeta_plus or _zeta_plus_wide(space, budget)

    def trial(i):
        rng = _trial_rng(seed, _TAG_MAXDEV, i)
        x = rng.standard_normal(d) * float(rng.uniform(0.2, 3.0))
        nx = float(pnorm(x, p))
        xs = duality_map(x, p)
        w = rng.standard_normal(d)
        g = float(xs @ w)
        # i % 3 == 0: quasi-orthogonal, where equality can occur
        push = 0.0 if i % 3 == 0 else float(rng.uniform(0.0, 1.0))
        z = w - (g + push * abs(g)) * x / nx
        nz_target = nx * float(rng.uniform(0.0, 4.0))
        nz = float(pnorm(z, p))
        if nz == 0.0:
            return math.inf, {}
        z = z * (nz_target / nz)
        lhs = float(pnorm(x + z, p))
        rhs = nx * float(zeta_plus(nz_target / nx))
        payload = {"x": x.tolist(), "z": z.tolist(), "lhs": lhs, "rhs": rhs}
        return rhs - lhs, payload

    results = _run(trial, trials, threads)
    return _report("max_deviation", results, seed, slack,
                   {"p": p, "dim": d, "mode": space.mode})


# --- the whole suite -----------------------------------------------------------------

def suite_spaces(ps=(1.5, 2.0, 3.0), dims=(2, 3, 4)):
    out = []
    for p in ps:
        for d in dims:
            out.append(SpaceSpec.euclidean(d) if p == 2.0 else SpaceSpec.lp(p, d))
    return out


def run_selfcheck(ps=(1.5, 2.0, 3.0), dims=(2, 3, 4), trials: int = 200, seed: int = 0,
                  budget: Budget = DEFAULT_BUDGET, threads: int = 1) -> list[CheckReport]:
    """All four checks over the grid of spaces; the supporting-line check runs in d = 2."""
    reports = []
    for space in suite_spaces(ps, dims):
        if space.dim == 2:
            reports.append(check_supporting_deviation(space, trials, seed=seed, threads=threads))
        reports.append(check_min_deviation_lemma(space, trials, seed=seed, budget=budget,
                                                 threads=threads))
        reports.append(check_sequence_corollary(space, None, trials, seed=seed, budget=budget,
                                                threads=threads))
        reports.append(check_max_deviation(space, trials, seed=seed, budget=budget,
                                           threads=threads))
    return reports

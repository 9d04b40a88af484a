"""Greedy witness/certificate search for no-dimensional Helly-type statements.

All searches work in the picture scaled by 1/r_k: a family is "good up to
radius r_k" at x exactly when every scaled set is within distance 1 of x/r_k.
A j-tuple is *good* when the nearest point p of its intersection to the
origin has norm > 1/r_j. Extending a good tuple by a set at distance > 1
from p yields a good (j+1)-tuple, which drives every search below.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, InputError, SolverError
from .geometry import (NearestPointResult, Tolerances, distance, intersects_ball,
                       nearest_point_intersection)
from .sequences import HELLY_R, RadiusSequence
from .sets import Ball, Hull, check_dim
from .space import SpaceSpec, pnorm

DEFAULT_TOL = 1e-9


@dataclass
class Witness:
    """A point x with dist(x, K) <= r_k (1 + tol) for every set K of the family."""

    x: np.ndarray
    per_set_dist: np.ndarray
    radius: float
    k: int
    color: int | None = None
    trace: list = field(default_factory=list)

    kind = "witness"

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "x": self.x.tolist(), "radius": self.radius, "k": self.k,
               "per_set_dist": self.per_set_dist.tolist(), "trace": self.trace}
        if self.color is not None:
            out["color"] = self.color
        return out


@dataclass
class Certificate:
    """A tuple of sets whose intersection misses the unit ball.

    ``indices`` are 0-based family positions, or ``(color, index)`` pairs for
    a rainbow tuple. ``dist_lower_bound`` is dist(0, intersection) in the
    original (unscaled) picture and exceeds 1; it is ``inf`` when the
    intersection is empty.
    """

    indices: list
    dist_lower_bound: float
    radius: float
    k: int
    empty: bool = False
    padded: bool = False
    trace: list = field(default_factory=list)

    kind = "certificate"

    def to_dict(self) -> dict:
        idx = [list(i) if isinstance(i, tuple) else i for i in self.indices]
        return {"kind": self.kind, "indices": idx, "dist_lower_bound": self.dist_lower_bound,
                "radius": self.radius, "k": self.k, "empty": self.empty,
                "padded": self.padded, "trace": self.trace}


HellyOutcome = Witness | Certificate


def _check_rseq(rseq: RadiusSequence):
    if rseq.kind != HELLY_R:
        raise InputError(f"expected a helly_r sequence, got {rseq.kind!r}")


def _check_family(space, family, name="family"):
    family = list(family)
    if not family:
        raise InputError(f"{name} must be nonempty")
    for i, s in enumerate(family):
        check_dim(space, s, f"{name}[{i}]")
    return family


def _distances(space, sets, p, threads=1):
    if threads > 1 and len(sets) > 8:
        with ThreadPoolExecutor(threads) as ex:
            return np.fromiter(ex.map(lambda s: distance(space, s, p), sets), float, len(sets))
    return np.array([distance(space, s, p) for s in sets])


def _trace_entry(j, chosen, res: NearestPointResult, scaled_norm):
    return {"j": j, "chosen": chosen, "scaled_dist": scaled_norm,
            "method": res.method, "iterations": res.iterations,
            "residual": res.residual, "converged": res.converged,
            "infeasible": res.infeasible, "solver": res.trace}


def _project(space, sets, tol):
    res = nearest_point_intersection(space, sets, np.zeros(space.dim), tol)
    if not res.converged and not res.infeasible:
        raise SolverError("projection onto the intersection did not converge", res.to_dict())
    return res


def _greedy(space, family, k, rk, tol, solver_tol, threads, allow_short=False):
    scaled = [s.scaled(1.0 / rk) for s in family]
    n = len(scaled)
    J: list[int] = []
    p = np.zeros(space.dim)
    trace: list = []
    while True:
        dists = _distances(space, scaled, p, threads)
        worst = int(np.argmax(dists))
        if dists[worst] <= 1.0 + tol:
            return Witness(rk * p, rk * dists, rk, k, None, trace)
        if len(J) == k or (allow_short and len(J) == n):
            norm_p = float(pnorm(p, space.p))
            if rk * norm_p <= 1.0:
                raise ContractError("greedy tuple does not clear the unit ball", trace)
            return Certificate(list(J), rk * norm_p, rk, k, False, False, trace)
        J.append(worst)
        res = _project(space, [scaled[i] for i in J], solver_tol)
        if res.infeasible:
            trace.append(_trace_entry(len(J), worst, res, math.inf))
            pad = [i for i in range(n) if i not in J][: k - len(J)]
            return Certificate(J + pad, math.inf, rk, k, True, bool(pad), trace)
        p = res.point
        trace.append(_trace_entry(len(J), worst, res, float(pnorm(p, space.p))))


def helly_search(space: SpaceSpec, family, k: int, rseq: RadiusSequence,
                 tol: float = DEFAULT_TOL, solver_tol: Tolerances | None = None,
                 threads: int = 1) -> Witness | Certificate:
    """Find a point r_k-close to every set, or a k-tuple missing the unit ball.

    Parameters
    ----------
    space : SpaceSpec
    family : list of convex sets
    k : int
        Tuple size, ``1 <= k <= len(family)``.
    rseq : RadiusSequence
        Helly radii of the space.
    tol : float
        Relative slack: distances up to ``r_k (1 + tol)`` count as hits.
    threads : int
        Worker threads for the per-set distance sweep.

    Returns
    -------
    Witness or Certificate
    """
    _check_rseq(rseq)
    family = _check_family(space, family)
    if not 1 <= k <= len(family):
        raise InputError(f"k must lie in [1, {len(family)}], got {k}")
    return _greedy(space, family, k, rseq[k], tol, solver_tol, threads)


def colorful_search(space: SpaceSpec, families, rseq: RadiusSequence,
                    tol: float = DEFAULT_TOL, solver_tol: Tolerances | None = None,
                    threads: int = 1) -> Witness | Certificate:
    """Colorful variant: one family per color, k = number of families.

    Returns a Witness with ``color`` set (every set of that color is
    r_k-close to ``x``) or a rainbow Certificate of ``(color, index)`` pairs.
    """
    _check_rseq(rseq)
    families = [_check_family(space, f, f"families[{c}]") for c, f in enumerate(families)]
    k = len(families)
    if k < 1:
        raise InputError("need at least one family")
    rk = rseq[k]
    scaled = [[s.scaled(1.0 / rk) for s in f] for f in families]
    J: list[tuple[int, int]] = []
    p = np.zeros(space.dim)
    trace: list = []
    for c in range(k):
        dists = _distances(space, scaled[c], p, threads)
        worst = int(np.argmax(dists))
        if dists[worst] <= 1.0 + tol:
            return Witness(rk * p, rk * dists, rk, k, c, trace)
        J.append((c, worst))
        res = _project(space, [scaled[cc][i] for cc, i in J], solver_tol)
        if res.infeasible:
            trace.append(_trace_entry(len(J), [c, worst], res, math.inf))
            pad = [(cc, 0) for cc in range(c + 1, k)]
            return Certificate(J + pad, math.inf, rk, k, True, bool(pad), trace)
        p = res.point
        trace.append(_trace_entry(len(J), [c, worst], res, float(pnorm(p, space.p))))
    norm_p = float(pnorm(p, space.p))
    if rk * norm_p <= 1.0:
        raise ContractError("rainbow tuple does not clear the unit ball", trace)
    return Certificate(J, rk * norm_p, rk, k, False, False, trace)


def verify_outcome(space: SpaceSpec, family_or_families, outcome, tol: float = DEFAULT_TOL,
                   colorful: bool = False) -> bool:
    """Independent re-check of a Witness or Certificate."""
    if isinstance(outcome, Witness):
        if colorful:
            family = list(family_or_families)[outcome.color]
        else:
            family = list(family_or_families)
        d = np.array([distance(space, s, outcome.x) for s in family])
        return bool(np.all(d <= outcome.radius * (1.0 + 2.0 * tol) + 2.0 * tol))
    if colorful:
        fams = list(family_or_families)
        sets = [fams[c][i] for c, i in outcome.indices]
    else:
        family = list(family_or_families)
        sets = [family[i] for i in outcome.indices]
    if len(set(map(tuple, outcome.indices)) if colorful else set(outcome.indices)) != len(outcome.indices):
        return False
    if len(outcome.indices) > outcome.k:
        return False
    meets, _ = intersects_ball(space, sets, Ball(np.zeros(space.dim), 1.0), tol)
    return meets is False


# --- fractional verification ----------------------------------------------------

@dataclass
class FractionalReport:
    alpha_empirical: float
    beta_target: float
    best_center: np.ndarray
    best_color: int | None
    covered_fraction: float
    tuples_checked: int
    sampled: bool
    alpha_supplied: float | None = None
    beta_empirical: float = 0.0
    covered_count: int = 0
    family_size: int = 0
    indeterminate: int = 0
    candidates_checked: int = 0
    radius: float = 0.0

    @property
    def clears_beta(self) -> bool:
        """Does the best center cover at least beta_empirical * |F| sets?"""
        return self.covered_count >= self.beta_empirical * self.family_size - 1e-9

    def to_dict(self) -> dict:
        return {
            "alpha_empirical": self.alpha_empirical, "alpha_supplied": self.alpha_supplied,
            "beta_target": self.beta_target, "beta_empirical": self.beta_empirical,
            "best_center": self.best_center.tolist(), "best_color": self.best_color,
            "covered_fraction": self.covered_fraction, "covered_count": self.covered_count,
            "family_size": self.family_size, "tuples_checked": self.tuples_checked,
            "sampled": self.sampled, "indeterminate": self.indeterminate,
            "candidates_checked": self.candidates_checked, "radius": self.radius,
            "clears_beta": self.clears_beta,
        }


def beta_from_alpha(alpha: float, k: int) -> float:
    return 1.0 - (1.0 - alpha) ** (1.0 / k)


def _tuples(sizes, k, colorful, budget, rng):
    """Yield index tuples and report whether they are a uniform sample."""
    if colorful:
        total = math.prod(sizes)
        if total <= budget:
            return list(itertools.product(*[range(s) for s in sizes])), False
        return [tuple(int(rng.integers(s)) for s in sizes) for _ in range(budget)], True
    n = sizes[0]
    total = math.comb(n, k)
    if total <= budget:
        return list(itertools.combinations(range(n), k)), False
    return [tuple(sorted(rng.choice(n, size=k, replace=False).tolist())) for _ in range(budget)], True


def fractional_verify(space: SpaceSpec, family_or_families, k: int, alpha: float | None,
                      rseq: RadiusSequence, tuple_budget: int = 20_000,
                      center_candidates: int = 5_000, seed: int = 0,
                      tol: float = DEFAULT_TOL, colorful: bool = False,
                      threads: int = 1) -> FractionalReport:
    """Measure alpha and search for a center meeting at least beta |F| sets.

    The center search walks the tree of greedy tuples used in the counting
    argument: starting from the origin, each node is the nearest point of a
    good tuple and its children extend the tuple by the node's violators. If
    no node at depth < k covers a beta fraction, the counting argument bounds
    the number of good k-tuples from below, so with an exact alpha the walk is
    complete; ``center_candidates`` caps the number of nodes visited. The
    walk stops at the first center that clears both the supplied and the
    empirical beta, so ``covered_fraction`` is a certified lower bound rather
    than the maximum.
    """
    _check_rseq(rseq)
    if alpha is not None and not 0.0 < alpha <= 1.0:
        raise InputError("alpha must lie in (0, 1]")
    if colorful:
        families = [_check_family(space, f, f"families[{c}]") for c, f in enumerate(family_or_families)]
        if len(families) != k:
            raise InputError(f"colorful mode needs exactly k = {k} families")
    else:
        families = [_check_family(space, family_or_families)]
        if not 1 <= k <= len(families[0]):
            raise InputError(f"k must lie in [1, {len(families[0])}]")
    rng = np.random.default_rng([seed, 7])
    sizes = [len(f) for f in families]
    tuples, sampled = _tuples(sizes, k, colorful, tuple_budget, rng)
    unit = Ball(np.zeros(space.dim), 1.0)

    def meets(t):
        sets = [families[c][i] for c, i in enumerate(t)] if colorful else [families[0][i] for i in t]
        return intersects_ball(space, sets, unit, tol).meets

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            verdicts = list(ex.map(meets, tuples))
    else:
        verdicts = [meets(t) for t in tuples]
    good = sum(1 for v in verdicts if v is True)
    indeterminate = sum(1 for v in verdicts if v is None)
    alpha_emp = good / len(tuples)
    beta_emp = beta_from_alpha(alpha_emp, k)
    beta_target = beta_from_alpha(alpha, k) if alpha is not None else beta_emp

    rk = rseq[k]
    scaled = [[s.scaled(1.0 / rk) for s in f] for f in families]
    best = (-1, None, None)  # (count, center, color)
    seen = set()
    queue = deque([((), np.zeros(space.dim))])
    visited = 0
    need = max(beta_emp, beta_target)
    while queue and visited < center_candidates:
        J, p = queue.popleft()
        visited += 1
        per_color = [_distances(space, fam, p, threads) for fam in scaled]
        for c, dists in enumerate(per_color):
            cnt = int(np.sum(dists <= 1.0 + tol))
            if best[1] is None or cnt / sizes[c] > best[0] / sizes[best[2]]:
                best = (cnt, rk * p, c)
        if best[0] >= need * sizes[best[2]] - 1e-9:
            break
        depth = len(J)
        if depth >= k - 1:
            continue
        color = depth if colorful else 0
        for i in np.flatnonzero(per_color[color] > 1.0 + tol):
            key = tuple(sorted(J + ((color, int(i)),)))
            if key in seen:
                continue
            seen.add(key)
            sets = [scaled[c][j] for c, j in key]
            res = nearest_point_intersection(space, sets, np.zeros(space.dim))
            if res.converged:
                queue.append((J + ((color, int(i)),), res.point))
    cnt, center, color = best
    n_best = sizes[color]
    return FractionalReport(
        alpha_empirical=alpha_emp, beta_target=beta_target, best_center=center,
        best_color=color if colorful else None, covered_fraction=cnt / n_best,
        tuples_checked=len(tuples), sampled=sampled, alpha_supplied=alpha,
        beta_empirical=beta_emp, covered_count=cnt, family_size=n_best,
        indeterminate=indeterminate, candidates_checked=visited, radius=rk)


# --- centerpoints ------------------------------------------------------------------

@dataclass
class CenterpointResult:
    x: np.ndarray
    r: float
    k: int
    directions_checked: int
    min_halfspace_count: int
    required: int
    passed: bool
    subset_size: int
    family_size: int
    outcome: Witness | Certificate | None = None

    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "r": self.r, "k": self.k,
                "directions_checked": self.directions_checked,
                "min_halfspace_count": self.min_halfspace_count, "required": self.required,
                "passed": self.passed, "subset_size": self.subset_size,
                "family_size": self.family_size}


MAX_CENTERPOINT_N = 14


def centerpoint(space: SpaceSpec, P, k: int, rseq: RadiusSequence, dir_samples: int = 256,
                seed: int = 0, tol: float = DEFAULT_TOL, threads: int = 1) -> CenterpointResult:
    """No-dimensional centerpoint of at most 14 points in the unit ball.

    Every halfspace containing the ball of radius r_k around the returned
    point contains at least ceil(n/k) points of P; this is checked on
    ``dir_samples`` random directions plus all pairwise difference directions.
    """
    if not space.is_euclidean:
        raise InputError("centerpoints are supported in euclidean mode only")
    _check_rseq(rseq)
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n = len(P)
    if P.shape[1] != space.dim:
        raise InputError(f"points have dimension {P.shape[1]}, expected {space.dim}")
    if not 1 <= n <= MAX_CENTERPOINT_N:
        raise InputError(f"need 1 <= n <= {MAX_CENTERPOINT_N} points, got {n}")
    if k < 1:
        raise InputError("k must be >= 1")
    if np.any(np.linalg.norm(P, axis=1) > 1.0 + 1e-9):
        raise InputError("all points must lie in the unit ball")
    m = (n * (k - 1)) // k + 1
    family = [Hull(P[list(c)]) for c in itertools.combinations(range(n), m)]
    rk = rseq[k]
    outcome = _greedy(space, family, k, rk, tol, None, threads, allow_short=True)
    required = -(-n // k)
    if isinstance(outcome, Certificate):
        raise ContractError("centerpoint search returned a certificate: any k hulls share a "
                            "point of P, so this indicates a solver failure", outcome)
    x = outcome.x
    rng = np.random.default_rng([seed, 11])
    U = rng.standard_normal((dir_samples, space.dim))
    diffs = (P[:, None, :] - P[None, :, :]).reshape(-1, space.dim)
    U = np.vstack([U, diffs])
    U = U[np.linalg.norm(U, axis=1) > 1e-12]
    U = U / np.linalg.norm(U, axis=1)[:, None]
    # halfspaces {y : <u, y> >= <u, x> - r} contain the ball of radius r around x
    thresh = U @ x - rk * (1.0 + tol) - 1e-12
    counts = np.sum(P @ U.T >= thresh[None, :], axis=0)
    min_count = int(counts.min()) if len(counts) else n
    return CenterpointResult(x, rk, k, len(U), min_count, required, min_count >= required,
                             m, len(family), outcome)

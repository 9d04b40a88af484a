"""Greedy no-dimensional Caratheodory: sums x_1 + ... + x_k of norm at most R_k."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, InputError, PreconditionError
from .minnorm import min_norm_point
from .sequences import CARATHEODORY_R, RadiusSequence, caratheodory_radii
from .space import SpaceSpec, duality_map, pnorm


@dataclass
class CaratheodoryRun:
    """One greedy run; index k-1 of each array refers to step k."""

    chosen: np.ndarray           # (K, d) points x_1..x_K
    chosen_indices: np.ndarray   # positions in S
    partial_norms: np.ndarray    # |a_k|, a_k = x_1 + ... + x_k
    bound: RadiusSequence
    inner_products: np.ndarray   # <x_{k+1}, a_k*>, nan where a_k = 0
    p: float

    @property
    def K(self) -> int:
        return len(self.partial_norms)

    def bounds(self) -> np.ndarray:
        return np.array([self.bound[k] for k in range(1, self.K + 1)])

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "K": self.K,
            "chosen_indices": self.chosen_indices.tolist(),
            "partial_norms": self.partial_norms.tolist(),
            "bounds": self.bounds().tolist(),
            "inner_products": [None if np.isnan(v) else float(v) for v in self.inner_products],
        }


def zero_in_hull(S, tol: float = 1e-9) -> bool:
    """Is the origin within Euclidean distance ``tol`` of conv(S)?

    Hull membership is affine, so the Euclidean test decides it for every norm.
    """
    res = min_norm_point(np.asarray(S, dtype=float))
    return float(np.linalg.norm(res.point)) <= tol


def greedy_caratheodory(space: SpaceSpec, S, K: int, Rseq: RadiusSequence | None = None,
                        tol: float = 1e-9, bound_tol: float = 1e-8) -> CaratheodoryRun:
    """Run the greedy selection for K steps.

    Parameters
    ----------
    space : SpaceSpec
        Must be uniformly convex (1 < p < inf).
    S : array_like, shape (n, d)
        Points in the unit ball with 0 in their convex hull.
    K : int
        Number of steps.
    Rseq : RadiusSequence, optional
        Bound sequence; computed for the space when omitted.
    tol : float
        Tolerance for the unit-ball and hull-membership preconditions.
    bound_tol : float
        Allowed excess of |a_k| over R_k before a ContractError is raised.

    Returns
    -------
    CaratheodoryRun
    """
    space.require_uniformly_convex()
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if S.shape[1] != space.dim or len(S) == 0:
        raise InputError(f"S must have shape (n, {space.dim})")
    if K < 1:
        raise InputError("K must be >= 1")
    p = space.p
    if np.any(pnorm(S, p, axis=1) > 1.0 + tol):
        raise PreconditionError("all points of S must lie in the unit ball")
    if not zero_in_hull(S, tol):
        raise PreconditionError("0 is not in the convex hull of S")
    if Rseq is None:
        Rseq = caratheodory_radii(space, K)
    if Rseq.kind != CARATHEODORY_R:
        raise InputError(f"expected a caratheodory_R sequence, got {Rseq.kind!r}")
    idx = np.zeros(K, dtype=int)
    norms = np.zeros(K)
    inner = np.full(max(K - 1, 0), np.nan)
    a = S[0].copy()
    norms[0] = float(pnorm(a, p))
    for k in range(1, K):
        if not np.any(a):
            j = 0
        else:
            g = S @ duality_map(a, p)
            j = int(np.argmin(g))
            inner[k - 1] = g[j]
        idx[k] = j
        a = a + S[j]
        norms[k] = float(pnorm(a, p))
    run = CaratheodoryRun(S[idx], idx, norms, Rseq, inner, p)
    bounds = run.bounds()
    excess = norms - bounds
    if np.any(excess > bound_tol):
        k = int(np.argmax(excess)) + 1
        raise ContractError(f"|a_{k}| = {norms[k - 1]:.17g} exceeds R_{k} = {bounds[k - 1]:.17g}", run)
    return run


def step_margins(run: CaratheodoryRun, zeta_plus) -> np.ndarray:
    """|a_k| zeta+(|x_{k+1}| / |a_k|) - |a_{k+1}| for each step with a_k != 0 (nan otherwise)."""
    out = np.full(run.K - 1, np.nan)
    xn = pnorm(run.chosen[1:], run.p, axis=1)
    for k in range(run.K - 1):
        ak = run.partial_norms[k]
        if ak > 0:
            out[k] = ak * float(zeta_plus(xn[k] / ak)) - run.partial_norms[k + 1]
    return out


def caratheodory_error_curve(run: CaratheodoryRun) -> np.ndarray:
    """Rows (k, |a_k / k|, R_k / k) for k = 1..K."""
    k = np.arange(1, run.K + 1, dtype=float)
    return np.column_stack([k, run.partial_norms / k, run.bounds() / k])


def error_curve_csv(run: CaratheodoryRun, fh=None) -> str:
    from .io import fmt_float
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "mean_norm", "bound_over_k"])
    for k, e, b in caratheodory_error_curve(run):
        w.writerow([int(k), fmt_float(e), fmt_float(b)])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text

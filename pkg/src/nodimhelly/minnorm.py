"""Wolfe's minimum-norm-point algorithm for convex hulls of finite point sets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class MinNormResult:
    point: np.ndarray
    weights: np.ndarray  # convex weights over the input rows
    iterations: int
    converged: bool


def _affine_minimizer(Q: np.ndarray) -> np.ndarray:
    """Weights v with sum(v) = 1 minimising ||Q^T v|| (may be negative)."""
    m = len(Q)
    K = np.zeros((m + 1, m + 1))
    K[:m, :m] = Q @ Q.T
    K[:m, m] = 1.0
    K[m, :m] = 1.0
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    v = sol[:m]
    return v / v.sum()


def min_norm_point(P, tol: float = 1e-13, maxiter: int = 2000) -> MinNormResult:
    """Point of conv(rows of P) of least Euclidean norm.

    Parameters
    ----------
    P : array, shape (n, d)
        Generating points.
    tol : float
        Relative tolerance of Wolfe's optimality test
        ``|x|^2 - min_i <P_i, x> <= tol * max_i |P_i|^2``.
    maxiter : int
        Cap on major plus minor cycles.

    Returns
    -------
    MinNormResult
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n = len(P)
    norms2 = np.einsum("ij,ij->i", P, P)
    scale = max(float(norms2.max()), 1e-300)
    S = [int(np.argmin(norms2))]
    w = np.array([1.0])
    x = P[S[0]].copy()
    tiny = 1e-14
    it = 0
    converged = False
    while it < maxiter:
        it += 1
        g = P @ x
        j = int(np.argmin(g))
        if float(x @ x) - g[j] <= tol * scale or j in S:
            converged = True
            break
        S.append(j)
        w = np.append(w, 0.0)
        while it < maxiter:
            it += 1
            v = _affine_minimizer(P[S])
            if np.all(v > tiny):
                w = v
                break
            neg = v <= tiny
            theta = float(np.min(w[neg] / (w[neg] - v[neg])))
            w = (1.0 - theta) * w + theta * v
            keep = w > tiny
            if keep.sum() == len(S) or not keep.any():
                # numerical stall: drop the smallest weight
                keep = np.ones(len(S), dtype=bool)
                keep[int(np.argmin(w))] = False
            S = [s for s, k in zip(S, keep) if k]
            w = w[keep]
            w = w / w.sum()
        x = w @ P[S]
    weights = np.zeros(n)
    weights[S] = w
    return MinNormResult(x, weights, it, converged)


def hull_projection(points, x0, tol: float = 1e-13) -> MinNormResult:
    """Euclidean projection of ``x0`` onto conv(points); ``point`` is in original coordinates."""
    x0 = np.asarray(x0, dtype=float)
    res = min_norm_point(np.asarray(points, dtype=float) - x0, tol)
    res.point = res.point + x0
    return res

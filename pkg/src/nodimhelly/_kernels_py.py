"""Pure-Python reference implementations of the hot kernels.

Every function here has a compiled twin in ``_kernels.pyx`` with the same
signature and the same arithmetic; ``kernels.py`` picks one at import.
"""
import math

import numpy as np

from .space import duality_map, pnorm

STATUS_CONVERGED = 0
STATUS_MAXITER = 1
STATUS_INFEASIBLE = 2

_MAX_BISECT = 400


def _pwl(ts, zs, tail_slope, t):
    n = len(ts)
    if t >= ts[n - 1]:
        return zs[n - 1] + tail_slope * (t - ts[n - 1])
    if t <= ts[0]:
        return zs[0]
    lo, hi = 0, n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ts[mid] <= t:
            lo = mid
        else:
            hi = mid
    w = (t - ts[lo]) / (ts[hi] - ts[lo])
    return zs[lo] + w * (zs[hi] - zs[lo])


def _bisect_r(zeta, target):
    # root of t*zeta(t) = target on [0, target]
    lo, hi = 0.0, target
    if hi * zeta(hi) - target < 0.0:
        return math.nan
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if mid * zeta(mid) - target < 0.0:
            lo = mid
        else:
            hi = mid
    glo = abs(lo * zeta(lo) - target)
    ghi = abs(hi * zeta(hi) - target)
    return lo if glo < ghi else hi


def _bisect_R(zeta_plus, target, lo_offset):
    # root of R / zeta_plus(1/(R-1)) = target on (1 + lo_offset, target + 1]
    def h(R):
        return R / zeta_plus(1.0 / (R - 1.0)) - target

    lo, hi = 1.0 + lo_offset, target + 1.0
    if h(hi) < 0.0 or h(lo) > 0.0:
        return math.nan
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if h(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return lo if abs(h(lo)) < abs(h(hi)) else hi


def _euclid_zeta(t):
    return math.sqrt(1.0 + t * t)


def rk_euclid(K):
    out = np.empty(K)
    out[0] = 1.0
    for j in range(1, K):
        out[j] = _bisect_r(_euclid_zeta, out[j - 1])
    return out


def rk_table(ts, zs, tail_slope, K):
    ts = list(map(float, ts))
    zs = list(map(float, zs))

    def zeta(t):
        return _pwl(ts, zs, tail_slope, t)

    out = np.empty(K)
    out[0] = 1.0
    for j in range(1, K):
        out[j] = _bisect_r(zeta, out[j - 1])
    return out


def Rk_euclid(K, lo_offset):
    out = np.empty(K)
    out[0] = 1.0
    for j in range(1, K):
        out[j] = _bisect_R(_euclid_zeta, out[j - 1], lo_offset)
    return out


def Rk_table(ts, zs, tail_slope, K, lo_offset):
    ts = list(map(float, ts))
    zs = list(map(float, zs))

    def zeta(t):
        return _pwl(ts, zs, tail_slope, t)

    out = np.empty(K)
    out[0] = 1.0
    for j in range(1, K):
        out[j] = _bisect_R(zeta, out[j - 1], lo_offset)
    return out


def dykstra_hb(A, b, C, r, x0, tol, feas_tol, maxiter, stall_window):
    """Euclidean Dykstra over halfspaces <A_i, x> <= b_i and balls |x - C_i| <= r_i.

    Returns ``(x, cycles, residual, status)``.
    """
    A = np.asarray(A, dtype=float)
    C = np.asarray(C, dtype=float)
    mh, mb = len(A), len(C)
    x = np.array(x0, dtype=float)
    inc = np.zeros((mh + mb, x.shape[0]))
    asq = [float(A[i] @ A[i]) for i in range(mh)]
    best = math.inf
    last_improve = 0
    resid = math.inf
    status = STATUS_MAXITER
    cycles = 0
    for it in range(1, maxiter + 1):
        cycles = it
        prev = x.copy()
        old = inc.copy()
        for i in range(mh):
            y = x + inc[i]
            viol = float(A[i] @ y) - b[i]
            z = y - (viol / asq[i]) * A[i] if viol > 0.0 else y
            inc[i] = y - z
            x = z
        for i in range(mb):
            y = x + inc[mh + i]
            dv = y - C[i]
            nd = math.sqrt(float(dv @ dv))
            z = C[i] + (r[i] / nd) * dv if nd > r[i] else y
            inc[mh + i] = y - z
            x = z
        resid = 0.0
        for i in range(mh):
            resid = max(resid, (float(A[i] @ x) - b[i]) / math.sqrt(asq[i]))
        for i in range(mb):
            dv = x - C[i]
            resid = max(resid, math.sqrt(float(dv @ dv)) - r[i])
        d = x - prev
        change = math.sqrt(float(d @ d))
        scale = 1.0 + math.sqrt(float(x @ x))
        dinc = math.sqrt(float(((inc - old) ** 2).sum()))
        # x can sit still for a cycle while the increments keep moving
        if resid <= feas_tol and change <= tol * scale and dinc <= tol * scale:
            status = STATUS_CONVERGED
            break
        if resid < best * (1.0 - 1e-3):
            best = resid
            last_improve = it
        elif it - last_improve >= stall_window and resid > feas_tol:
            status = STATUS_INFEASIBLE
            break
    return x, cycles, max(resid, 0.0), status


# --- modulus search -----------------------------------------------------------

KIND_DELTA, KIND_ZETA, KIND_RHO = 0, 1, 2


def _normalize_blocks(Z, d):
    R = Z.shape[0]
    n = np.linalg.norm(Z.reshape(R, -1, d), axis=2)
    return Z / np.maximum(n, 1e-300).repeat(d, axis=1)


def _zeta_objective(p, d, eps):
    bad = np.nan

    def obj(Z):
        u, w = Z[:, :d], Z[:, d:]
        x = u / pnorm(u, p)[:, None]
        xs = duality_map(x, p)
        xx = np.sum(xs * x, axis=1)[:, None]
        y0 = w - (np.sum(xs * w, axis=1)[:, None] / xx) * x
        ny = pnorm(y0, p)
        ok = ny > 1e-3
        y = y0 / np.where(ok, ny, 1.0)[:, None]
        # second pass removes the cancellation error of the first
        y = y - (np.sum(xs * y, axis=1)[:, None] / xx) * x
        y = y / pnorm(y, p)[:, None]
        return np.where(ok, pnorm(x + eps * y, p), bad)

    return obj


def _delta_objective(p, d, eps, iters=32):
    def obj(Z):
        u, w = Z[:, :d], Z[:, d:]
        x = u / pnorm(u, p)[:, None]
        xh = x / np.linalg.norm(x, axis=1)[:, None]
        wp = w - np.sum(w * xh, axis=1)[:, None] * xh
        nw = np.linalg.norm(wp, axis=1)
        ok = nw > 1e-3
        wh = wp / np.where(ok, nw, 1.0)[:, None]

        def point(phi):
            v = np.cos(phi)[:, None] * xh + np.sin(phi)[:, None] * wh
            return v / pnorm(v, p)[:, None]

        lo = np.zeros(len(Z))
        hi = np.full(len(Z), np.pi)
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            below = pnorm(x - point(mid), p) < eps
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        y = point(hi)
        # hi keeps ||x - y|| >= eps, so every candidate is admissible
        return np.where(ok, 1.0 - pnorm(x + y, p) / 2.0, np.inf)

    return obj


def _rho_objective(p, d, tau):
    def obj(Z):
        u, v = Z[:, :d], Z[:, d:]
        x = u / pnorm(u, p)[:, None]
        y = tau * v / pnorm(v, p)[:, None]
        return (pnorm(x + y, p) + pnorm(x - y, p)) / 2.0 - 1.0

    return obj



def modulus_search(kind, p, d, eps, Z0, noise, maximize, delta_iters=32):
    """Accept-if-better random local search, one restart per row of ``Z0``.

    ``noise`` has shape (iterations, restarts, 2*d). Returns the best value.
    """
    if kind == KIND_DELTA:
        objective = _delta_objective(p, d, eps, delta_iters)
    elif kind == KIND_ZETA:
        objective = _zeta_objective(p, d, eps)
    else:
        objective = _rho_objective(p, d, eps)
    sgn = -1.0 if maximize else 1.0

    def signed(Z):
        v = sgn * objective(Z)
        return np.where(np.isnan(v), np.inf, v)

    Z = np.array(Z0, dtype=float)
    f = signed(Z)
    sigma = np.full(len(Z), 0.5)
    for step in noise:
        cand = _normalize_blocks(Z + sigma[:, None] * step, d)
        fc = signed(cand)
        better = fc < f
        Z[better] = cand[better]
        f[better] = fc[better]
        sigma = np.clip(np.where(better, sigma * 1.5, sigma * 0.85), 1e-10, 2.0)
    return float(sgn * np.min(f))

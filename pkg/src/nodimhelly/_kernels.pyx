# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_kernels_py.py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, NAN, INFINITY

cnp.import_array()

DEF MAX_BISECT = 400

cdef int STATUS_CONVERGED = 0
cdef int STATUS_MAXITER = 1
cdef int STATUS_INFEASIBLE = 2


cdef inline double _pwl(const double[:] ts, const double[:] zs,
                        double tail_slope, double t) nogil:
    cdef Py_ssize_t n = ts.shape[0]
    cdef Py_ssize_t lo, hi, mid
    cdef double w
    if t >= ts[n - 1]:
        return zs[n - 1] + tail_slope * (t - ts[n - 1])
    if t <= ts[0]:
        return zs[0]
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ts[mid] <= t:
            lo = mid
        else:
            hi = mid
    w = (t - ts[lo]) / (ts[hi] - ts[lo])
    return zs[lo] + w * (zs[hi] - zs[lo])


cdef inline double _zeta(int euclid, const double[:] ts, const double[:] zs,
                         double tail_slope, double t) nogil:
    if euclid:
        return sqrt(1.0 + t * t)
    return _pwl(ts, zs, tail_slope, t)


cdef double _bisect_r(int euclid, const double[:] ts, const double[:] zs,
                      double tail_slope, double target) nogil:
    cdef double lo = 0.0, hi = target, mid, glo, ghi
    cdef int it
    if hi * _zeta(euclid, ts, zs, tail_slope, hi) - target < 0.0:
        return NAN
    for it in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if mid * _zeta(euclid, ts, zs, tail_slope, mid) - target < 0.0:
            lo = mid
        else:
            hi = mid
    glo = fabs(lo * _zeta(euclid, ts, zs, tail_slope, lo) - target)
    ghi = fabs(hi * _zeta(euclid, ts, zs, tail_slope, hi) - target)
    return lo if glo < ghi else hi


cdef inline double _h(int euclid, const double[:] ts, const double[:] zs,
                      double tail_slope, double R, double target) nogil:
    return R / _zeta(euclid, ts, zs, tail_slope, 1.0 / (R - 1.0)) - target


cdef double _bisect_R(int euclid, const double[:] ts, const double[:] zs,
                      double tail_slope, double target, double lo_offset) nogil:
    cdef double lo = 1.0 + lo_offset, hi = target + 1.0, mid
    cdef int it
    if _h(euclid, ts, zs, tail_slope, hi, target) < 0.0:
        return NAN
    if _h(euclid, ts, zs, tail_slope, lo, target) > 0.0:
        return NAN
    for it in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _h(euclid, ts, zs, tail_slope, mid, target) < 0.0:
            lo = mid
        else:
            hi = mid
    if fabs(_h(euclid, ts, zs, tail_slope, lo, target)) < fabs(_h(euclid, ts, zs, tail_slope, hi, target)):
        return lo
    return hi


_EMPTY = np.zeros(1)


def rk_euclid(int K):
    cdef cnp.ndarray[double, ndim=1] out = np.empty(K)
    cdef const double[:] e = _EMPTY
    cdef Py_ssize_t j
    out[0] = 1.0
    with nogil:
        for j in range(1, K):
            out[j] = _bisect_r(1, e, e, 0.0, out[j - 1])
    return out


def rk_table(ts, zs, double tail_slope, int K):
    cdef const double[:] tv = np.ascontiguousarray(ts, dtype=float)
    cdef const double[:] zv = np.ascontiguousarray(zs, dtype=float)
    cdef cnp.ndarray[double, ndim=1] out = np.empty(K)
    cdef Py_ssize_t j
    out[0] = 1.0
    with nogil:
        for j in range(1, K):
            out[j] = _bisect_r(0, tv, zv, tail_slope, out[j - 1])
    return out


def Rk_euclid(int K, double lo_offset):
    cdef cnp.ndarray[double, ndim=1] out = np.empty(K)
    cdef const double[:] e = _EMPTY
    cdef Py_ssize_t j
    out[0] = 1.0
    with nogil:
        for j in range(1, K):
            out[j] = _bisect_R(1, e, e, 0.0, out[j - 1], lo_offset)
    return out


def Rk_table(ts, zs, double tail_slope, int K, double lo_offset):
    cdef const double[:] tv = np.ascontiguousarray(ts, dtype=float)
    cdef const double[:] zv = np.ascontiguousarray(zs, dtype=float)
    cdef cnp.ndarray[double, ndim=1] out = np.empty(K)
    cdef Py_ssize_t j
    out[0] = 1.0
    with nogil:
        for j in range(1, K):
            out[j] = _bisect_R(0, tv, zv, tail_slope, out[j - 1], lo_offset)
    return out


def dykstra_hb(A, b, C, r, x0, double tol, double feas_tol, int maxiter,
               int stall_window):
    """Euclidean Dykstra over halfspaces <A_i, x> <= b_i and balls |x - C_i| <= r_i.

    Returns ``(x, cycles, residual, status)``.
    """
    cdef double[:, :] Av = np.array(A, dtype=float, ndmin=2, copy=True)
    cdef double[:] bv = np.array(b, dtype=float, ndmin=1, copy=True)
    cdef double[:, :] Cv = np.array(C, dtype=float, ndmin=2, copy=True)
    cdef double[:] rv = np.array(r, dtype=float, ndmin=1, copy=True)
    cdef cnp.ndarray[double, ndim=1] xo = np.array(x0, dtype=float, copy=True)
    cdef double[:] x = xo
    cdef Py_ssize_t d = x.shape[0]
    cdef Py_ssize_t mh = len(A), mb = len(C)
    cdef double[:, :] inc = np.zeros((mh + mb, d))
    cdef double[:] prev = np.zeros(d)
    cdef double[:] y = np.zeros(d)
    cdef double[:] asq = np.zeros(max(mh, 1))
    cdef double best = INFINITY, resid = INFINITY, viol, nd, change, scale, s, f, dinc, e
    cdef int last_improve = 0, status = STATUS_MAXITER, it, cycles = 0
    cdef Py_ssize_t i, k
    with nogil:
        for i in range(mh):
            s = 0.0
            for k in range(d):
                s += Av[i, k] * Av[i, k]
            asq[i] = s
        for it in range(1, maxiter + 1):
            cycles = it
            dinc = 0.0
            for k in range(d):
                prev[k] = x[k]
            for i in range(mh):
                viol = -bv[i]
                for k in range(d):
                    y[k] = x[k] + inc[i, k]
                    viol += Av[i, k] * y[k]
                if viol > 0.0:
                    f = viol / asq[i]
                    for k in range(d):
                        x[k] = y[k] - f * Av[i, k]
                else:
                    for k in range(d):
                        x[k] = y[k]
                for k in range(d):
                    e = y[k] - x[k]
                    dinc += (e - inc[i, k]) * (e - inc[i, k])
                    inc[i, k] = e
            for i in range(mb):
                s = 0.0
                for k in range(d):
                    y[k] = x[k] + inc[mh + i, k]
                    s += (y[k] - Cv[i, k]) * (y[k] - Cv[i, k])
                nd = sqrt(s)
                if nd > rv[i]:
                    f = rv[i] / nd
                    for k in range(d):
                        x[k] = Cv[i, k] + f * (y[k] - Cv[i, k])
                else:
                    for k in range(d):
                        x[k] = y[k]
                for k in range(d):
                    e = y[k] - x[k]
                    dinc += (e - inc[mh + i, k]) * (e - inc[mh + i, k])
                    inc[mh + i, k] = e
            resid = 0.0
            for i in range(mh):
                s = -bv[i]
                for k in range(d):
                    s += Av[i, k] * x[k]
                s = s / sqrt(asq[i])
                if s > resid:
                    resid = s
            for i in range(mb):
                s = 0.0
                for k in range(d):
                    s += (x[k] - Cv[i, k]) * (x[k] - Cv[i, k])
                s = sqrt(s) - rv[i]
                if s > resid:
                    resid = s
            change = 0.0
            scale = 0.0
            for k in range(d):
                change += (x[k] - prev[k]) * (x[k] - prev[k])
                scale += x[k] * x[k]
            change = sqrt(change)
            scale = 1.0 + sqrt(scale)
            # x can sit still for a cycle while the increments keep moving
            if resid <= feas_tol and change <= tol * scale and sqrt(dinc) <= tol * scale:
                status = STATUS_CONVERGED
                break
            if resid < best * (1.0 - 1e-3):
                best = resid
                last_improve = it
            elif it - last_improve >= stall_window and resid > feas_tol:
                status = STATUS_INFEASIBLE
                break
    return xo, cycles, resid, status


# --- modulus search -----------------------------------------------------------

from libc.math cimport pow as cpow, cos, sin
from libc.stdlib cimport malloc, free

DEF KIND_DELTA = 0
DEF KIND_ZETA = 1
DEF KIND_RHO = 2


cdef inline double _pn(const double* v, Py_ssize_t d, double p) nogil:
    cdef double s = 0.0
    cdef Py_ssize_t k
    if p == 2.0:
        for k in range(d):
            s += v[k] * v[k]
        return sqrt(s)
    for k in range(d):
        s += cpow(fabs(v[k]), p)
    return cpow(s, 1.0 / p)


cdef double _objective(int kind, double p, Py_ssize_t d, double eps,
                       const double* z, double* buf, int delta_iters) nogil:
    # buf holds at least 6*d doubles
    cdef double* x = buf
    cdef double* y = buf + d
    cdef double* xs = buf + 2 * d
    cdef double* t = buf + 3 * d
    cdef double* xh = buf + 4 * d
    cdef double* wh = buf + 5 * d
    cdef const double* u = z
    cdef const double* w = z + d
    cdef double nu, nv, xx, xw, ny, xy, s, lo, hi, mid, c, sn, nt
    cdef Py_ssize_t k
    cdef int it
    nu = _pn(u, d, p)
    for k in range(d):
        x[k] = u[k] / nu
    if kind == KIND_RHO:
        nv = _pn(w, d, p)
        for k in range(d):
            y[k] = x[k] + eps * w[k] / nv
            t[k] = x[k] - eps * w[k] / nv
        return (_pn(y, d, p) + _pn(t, d, p)) / 2.0 - 1.0
    if kind == KIND_ZETA:
        if p == 2.0:
            s = sqrt(_dot(x, x, d))
            for k in range(d):
                xs[k] = x[k] / s
        else:
            for k in range(d):
                if x[k] > 0:
                    xs[k] = cpow(x[k], p - 1.0)
                elif x[k] < 0:
                    xs[k] = -cpow(-x[k], p - 1.0)
                else:
                    xs[k] = 0.0
        xx = _dot(xs, x, d)
        xw = _dot(xs, w, d)
        for k in range(d):
            y[k] = w[k] - (xw / xx) * x[k]
        ny = _pn(y, d, p)
        if not ny > 1e-3:
            return NAN
        for k in range(d):
            y[k] = y[k] / ny
        xy = _dot(xs, y, d)
        for k in range(d):
            y[k] = y[k] - (xy / xx) * x[k]
        ny = _pn(y, d, p)
        for k in range(d):
            t[k] = x[k] + eps * y[k] / ny
        return _pn(t, d, p)
    # KIND_DELTA
    s = sqrt(_dot(x, x, d))
    for k in range(d):
        xh[k] = x[k] / s
    xw = _dot(w, xh, d)
    for k in range(d):
        wh[k] = w[k] - xw * xh[k]
    nt = sqrt(_dot(wh, wh, d))
    if not nt > 1e-3:
        return NAN
    for k in range(d):
        wh[k] = wh[k] / nt
    lo = 0.0
    hi = 3.141592653589793
    for it in range(delta_iters):
        mid = 0.5 * (lo + hi)
        _arc(xh, wh, mid, y, d, p)
        for k in range(d):
            t[k] = x[k] - y[k]
        if _pn(t, d, p) < eps:
            lo = mid
        else:
            hi = mid
    _arc(xh, wh, hi, y, d, p)
    for k in range(d):
        t[k] = x[k] + y[k]
    return 1.0 - _pn(t, d, p) / 2.0


cdef inline double _dot(const double* a, const double* b, Py_ssize_t d) nogil:
    cdef double s = 0.0
    cdef Py_ssize_t k
    for k in range(d):
        s += a[k] * b[k]
    return s


cdef inline void _arc(const double* xh, const double* wh, double phi, double* out,
                      Py_ssize_t d, double p) nogil:
    cdef double c = cos(phi), sn = sin(phi), n
    cdef Py_ssize_t k
    for k in range(d):
        out[k] = c * xh[k] + sn * wh[k]
    n = _pn(out, d, p)
    for k in range(d):
        out[k] = out[k] / n


cdef inline void _normalize_blocks(double* z, Py_ssize_t d, Py_ssize_t nb) nogil:
    cdef Py_ssize_t b, k
    cdef double s
    for b in range(nb):
        s = 0.0
        for k in range(d):
            s += z[b * d + k] * z[b * d + k]
        s = sqrt(s)
        if s < 1e-300:
            s = 1e-300
        for k in range(d):
            z[b * d + k] = z[b * d + k] / s


def modulus_search(int kind, double p, int d, double eps, Z0, noise, bint maximize,
                   int delta_iters=32):
    """Accept-if-better random local search, one restart per row of ``Z0``.

    ``noise`` has shape (iterations, restarts, 2*d). Returns the best value.
    """
    cdef double[:, :] Z = np.array(Z0, dtype=float, copy=True)
    cdef const double[:, :, :] N = np.ascontiguousarray(noise, dtype=float)
    cdef Py_ssize_t R = Z.shape[0], m = Z.shape[1], T = N.shape[0]
    cdef Py_ssize_t r, it, k
    cdef double sgn = -1.0 if maximize else 1.0
    cdef double f, fc, sigma, best = INFINITY, v
    cdef double* cand = <double*> malloc(m * sizeof(double))
    cdef double* cur = <double*> malloc(m * sizeof(double))
    cdef double* buf = <double*> malloc(6 * d * sizeof(double))
    try:
        with nogil:
            for r in range(R):
                for k in range(m):
                    cur[k] = Z[r, k]
                v = _objective(kind, p, d, eps, cur, buf, delta_iters)
                f = INFINITY if v != v else sgn * v
                sigma = 0.5
                for it in range(T):
                    for k in range(m):
                        cand[k] = cur[k] + sigma * N[it, r, k]
                    _normalize_blocks(cand, d, 2)
                    v = _objective(kind, p, d, eps, cand, buf, delta_iters)
                    fc = INFINITY if v != v else sgn * v
                    if fc < f:
                        f = fc
                        for k in range(m):
                            cur[k] = cand[k]
                        sigma = sigma * 1.5
                    else:
                        sigma = sigma * 0.85
                    if sigma < 1e-10:
                        sigma = 1e-10
                    elif sigma > 2.0:
                        sigma = 2.0
                if f < best:
                    best = f
    finally:
        free(cand)
        free(cur)
        free(buf)
    return sgn * best

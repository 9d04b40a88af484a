"""Membership, distances and nearest points in the ambient l_p norm.

Euclidean mode uses closed forms, Dykstra's algorithm and Wolfe's
minimum-norm-point method. The generic l_p mode uses closed forms for single
halfspaces and balls, linear programming for p in {1, inf}, and SLSQP for
1 < p < inf. Whenever an iterative method stalls, a phase-one feasibility
problem decides between "empty intersection" and "solver trouble".
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, minimize

from . import kernels
from .errors import InputError
from .minnorm import hull_projection
from .sets import Ball, Halfspace, Hull, Polytope, check_dim
from .space import SpaceSpec, as_vector, duality_map, pnorm


@dataclass(frozen=True)
class Tolerances:
    """Solver tolerances; see :func:`default_tolerances`."""

    feas: float
    maxiter: int
    step: float = 1e-12
    stall_window: int = 200


def default_tolerances(space: SpaceSpec) -> Tolerances:
    if space.is_euclidean:
        return Tolerances(feas=1e-8, maxiter=10_000)
    return Tolerances(feas=1e-6, maxiter=100_000)


@dataclass
class NearestPointResult:
    point: np.ndarray | None
    dist: float
    converged: bool
    iterations: int
    residual: float
    infeasible: bool = False
    method: str = ""
    trace: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "point": None if self.point is None else self.point.tolist(),
            "dist": self.dist,
            "converged": self.converged,
            "infeasible": self.infeasible,
            "iterations": self.iterations,
            "residual": self.residual,
            "method": self.method,
            "trace": self.trace,
        }


def _infeasible(iterations, residual, method, trace):
    return NearestPointResult(None, math.inf, False, iterations, residual, True, method, trace)


# --- flattened constraint lists ----------------------------------------------

@dataclass
class _Flat:
    A: np.ndarray  # halfspace normals (m, d)
    b: np.ndarray
    C: np.ndarray  # ball centers (mb, d)
    r: np.ndarray
    hulls: list

    @property
    def linear_only(self) -> bool:
        return len(self.C) == 0


def _flatten(sets, d) -> _Flat:
    A, b, C, r, H = [], [], [], [], []
    for s in sets:
        if isinstance(s, Halfspace):
            A.append(s.a)
            b.append(s.b)
        elif isinstance(s, Polytope):
            for h in s.halfspaces:
                A.append(h.a)
                b.append(h.b)
        elif isinstance(s, Ball):
            C.append(s.center)
            r.append(s.radius)
        else:
            H.append(np.asarray(s.points))
    return _Flat(np.array(A, dtype=float).reshape(-1, d), np.array(b, dtype=float),
                 np.array(C, dtype=float).reshape(-1, d), np.array(r, dtype=float), H)


def _unit_dual_direction(a: np.ndarray, p: float) -> np.ndarray:
    """A unit vector u in l_p with <a, u> = ||a||_q."""
    if math.isinf(p):
        return np.sign(a)
    if p == 1.0:
        i = int(np.argmax(np.abs(a)))
        u = np.zeros_like(a)
        u[i] = np.sign(a[i])
        return u
    q = p / (p - 1.0)
    return duality_map(a, q)


# --- closed forms ------------------------------------------------------------

def _halfspace_step(h: Halfspace, x: np.ndarray, p: float):
    q = math.inf if p == 1.0 else (1.0 if math.isinf(p) else p / (p - 1.0))
    na = float(pnorm(h.a, q))
    viol = float(h.a @ x) - h.b
    if viol <= 0.0:
        return x.copy(), 0.0
    dist = viol / na
    if p == 2.0:
        return x - (viol / (na * na)) * h.a, dist
    return x - dist * _unit_dual_direction(h.a, p), dist


def _ball_step(bl: Ball, x: np.ndarray, p: float):
    v = x - bl.center
    nv = float(pnorm(v, p))
    if nv <= bl.radius:
        return x.copy(), 0.0
    return bl.center + (bl.radius / nv) * v, nv - bl.radius


# --- Dykstra -------------------------------------------------------------------

def _dykstra_generic(projectors, dists, x0, tol: Tolerances):
    """Dykstra's method over arbitrary Euclidean projectors."""
    x = np.array(x0, dtype=float)
    inc = np.zeros((len(projectors), x.shape[0]))
    best, last_improve = math.inf, 0
    resid = math.inf
    status = kernels.STATUS_MAXITER
    cycles = 0
    for it in range(1, tol.maxiter + 1):
        cycles = it
        prev = x
        old = inc.copy()
        for i, proj in enumerate(projectors):
            y = x + inc[i]
            z = proj(y)
            inc[i] = y - z
            x = z
        resid = max(0.0, max(dist(x) for dist in dists))
        change = float(np.linalg.norm(x - prev))
        dinc = float(np.linalg.norm(inc - old))
        scale = 1.0 + float(np.linalg.norm(x))
        if resid <= tol.feas and change <= tol.step * scale and dinc <= tol.step * scale:
            status = kernels.STATUS_CONVERGED
            break
        if resid < best * (1.0 - 1e-3):
            best, last_improve = resid, it
        elif it - last_improve >= tol.stall_window and resid > tol.feas:
            status = kernels.STATUS_INFEASIBLE
            break
    return x, cycles, resid, status


def _euclid_projectors(flat: _Flat):
    projs, dists = [], []
    for a, b in zip(flat.A, flat.b):
        h = Halfspace(a, b)
        na = float(np.linalg.norm(a))
        projs.append(lambda y, h=h: _halfspace_step(h, y, 2.0)[0])
        dists.append(lambda y, a=a, b=b, na=na: (float(a @ y) - b) / na)
    for c, r in zip(flat.C, flat.r):
        bl = Ball(c, r)
        projs.append(lambda y, bl=bl: _ball_step(bl, y, 2.0)[0])
        dists.append(lambda y, c=c, r=r: float(np.linalg.norm(y - c)) - r)
    for P in flat.hulls:
        projs.append(lambda y, P=P: hull_projection(P, y).point)
        dists.append(lambda y, P=P: float(np.linalg.norm(y - hull_projection(P, y).point)))
    return projs, dists


def _dykstra(flat: _Flat, x0, tol: Tolerances):
    if not flat.hulls:
        x, cycles, resid, status = kernels.backend.dykstra_hb(
            flat.A, flat.b, flat.C, flat.r, np.asarray(x0, dtype=float),
            tol.step, tol.feas, tol.maxiter, tol.stall_window)
        return np.asarray(x), int(cycles), float(resid), int(status), "dykstra"
    projs, dists = _euclid_projectors(flat)
    # hull projections are costly, so cap the generic loop lower
    gtol = Tolerances(tol.feas, min(tol.maxiter, 2000), tol.step, tol.stall_window)
    x, cycles, resid, status = _dykstra_generic(projs, dists, x0, gtol)
    return x, cycles, resid, status, "dykstra-generic"


_STATUS_NAMES = {kernels.STATUS_CONVERGED: "converged", kernels.STATUS_MAXITER: "maxiter",
                 kernels.STATUS_INFEASIBLE: "stalled"}


# --- phase one: is the intersection empty? -------------------------------------

def _linear_system(flat: _Flat, d: int, extra: int = 0):
    """Equality and inequality rows over z = (y, lambda_1, ..., lambda_H, extra...)."""
    nl = sum(len(P) for P in flat.hulls)
    nv = d + nl + extra
    A_ub = np.zeros((len(flat.A), nv))
    A_ub[:, :d] = flat.A
    b_ub = flat.b.copy()
    eq_rows, eq_rhs = [], []
    off = d
    for P in flat.hulls:
        n = len(P)
        blk = np.zeros((d + 1, nv))
        blk[:d, :d] = np.eye(d)
        blk[:d, off:off + n] = -P.T
        blk[d, off:off + n] = 1.0
        eq_rows.append(blk)
        eq_rhs.append(np.r_[np.zeros(d), 1.0])
        off += n
    A_eq = np.vstack(eq_rows) if eq_rows else None
    b_eq = np.concatenate(eq_rhs) if eq_rhs else None
    bounds = [(None, None)] * d + [(0, None)] * nl + [(None, None)] * extra
    return A_ub, b_ub, A_eq, b_eq, bounds, nv


_HIGHS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


def _linear_feasible_point(flat: _Flat, d: int):
    A_ub, b_ub, A_eq, b_eq, bounds, nv = _linear_system(flat, d)
    if len(A_ub) == 0 and A_eq is None:
        return np.zeros(d), True
    # the norm of A rows can be arbitrary; feasibility is scale-free
    res = linprog(np.zeros(nv), A_ub=A_ub if len(A_ub) else None,
                  b_ub=b_ub if len(A_ub) else None, A_eq=A_eq, b_eq=b_eq,
                  bounds=bounds, method="highs", options=_HIGHS)
    if res.status == 2:
        return None, False
    if res.status != 0:
        return None, None
    return res.x[:d], True


def _phase_one(space: SpaceSpec, flat: _Flat, d: int):
    """Least achievable max ball violation subject to the linear constraints.

    Returns ``(gap, point)``: ``gap = inf`` when the linear part is empty,
    ``gap = nan`` when the solvers gave no verdict.
    """
    y_lin, ok = _linear_feasible_point(flat, d)
    if ok is False:
        return math.inf, None
    if ok is None:
        return math.nan, None
    if flat.linear_only:
        return 0.0, y_lin
    p = space.p
    A_ub, b_ub, A_eq, b_eq, bounds, nv = _linear_system(flat, d, extra=1)
    if p in (1.0, math.inf):
        # ball constraints are polyhedral: |y - c|_p <= r + t
        rows, rhs = [], []
        nb = len(flat.C)
        extra = d * nb if p == 1.0 else 0
        nv2 = nv + extra
        pad = lambda M: np.hstack([M, np.zeros((M.shape[0], extra))]) if M is not None and len(M) else M
        A_ub2, A_eq2 = pad(A_ub), pad(A_eq)
        tcol = nv - 1
        for j, (c, r) in enumerate(zip(flat.C, flat.r)):
            if p == 1.0:
                base = nv + j * d
                for i in range(d):
                    for sgn in (1.0, -1.0):
                        row = np.zeros(nv2)
                        row[i] = sgn
                        row[base + i] = -1.0
                        rows.append(row)
                        rhs.append(sgn * c[i])
                row = np.zeros(nv2)
                row[base:base + d] = 1.0
                row[tcol] = -1.0
                rows.append(row)
                rhs.append(r)
            else:
                for i in range(d):
                    for sgn in (1.0, -1.0):
                        row = np.zeros(nv2)
                        row[i] = sgn
                        row[tcol] = -1.0
                        rows.append(row)
                        rhs.append(r + sgn * c[i])
        A_all = np.vstack([A_ub2, np.array(rows)]) if len(A_ub) else np.array(rows)
        b_all = np.concatenate([b_ub, rhs]) if len(A_ub) else np.array(rhs)
        cost = np.zeros(nv2)
        cost[tcol] = 1.0
        res = linprog(cost, A_ub=A_all, b_ub=b_all, A_eq=A_eq2, b_eq=b_eq,
                      bounds=bounds + [(0, None)] * extra, method="highs", options=_HIGHS)
        if res.status != 0:
            return math.nan, None
        return max(float(res.x[tcol]), 0.0), res.x[:d]
    # smooth case: minimise t subject to |y - c_j|_p - r_j <= t
    nl = nv - d - 1
    z0 = np.zeros(nv)
    z0[:d] = y_lin
    if flat.hulls:
        off = d
        for P in flat.hulls:
            w = hull_projection(P, y_lin).weights
            z0[off:off + len(P)] = w
            off += len(P)
    z0[-1] = max(float(np.max(pnorm(y_lin - flat.C, p) - flat.r)), 0.0)
    cons = _linear_constraints(flat, d, nv)

    def ball_fun(z):
        return z[-1] - (pnorm(z[:d] - flat.C, p) - flat.r)

    def ball_jac(z):
        J = np.zeros((len(flat.C), nv))
        V = z[:d] - flat.C
        nz = np.any(V != 0, axis=1)
        if nz.any():
            J[nz, :d] = -duality_map(V[nz], p)
        J[:, -1] = 1.0
        return J

    cons.append({"type": "ineq", "fun": ball_fun, "jac": ball_jac})
    cost = np.zeros(nv)
    cost[-1] = 1.0
    res = minimize(lambda z: z[-1], z0, jac=lambda z: cost, method="SLSQP",
                   bounds=bounds, constraints=cons,
                   options={"ftol": 1e-15, "maxiter": 1000})
    y = res.x[:d]
    gap = max(float(np.max(pnorm(y - flat.C, p) - flat.r)), 0.0)
    lin = _linear_residual(flat, res.x, d, p)
    if lin > 1e-9:
        return math.nan, None
    return gap, y


def _linear_constraints(flat: _Flat, d: int, nv: int):
    cons = []
    if len(flat.A):
        An = flat.A / np.linalg.norm(flat.A, axis=1)[:, None]
        bn = flat.b / np.linalg.norm(flat.A, axis=1)
        J = np.zeros((len(An), nv))
        J[:, :d] = -An
        cons.append({"type": "ineq", "fun": lambda z: bn - An @ z[:d], "jac": lambda z: J})
    if flat.hulls:
        _, _, A_eq, b_eq, _, nv0 = _linear_system(flat, d)
        E = np.zeros((len(A_eq), nv))
        E[:, :nv0] = A_eq
        cons.append({"type": "eq", "fun": lambda z: E @ z - b_eq, "jac": lambda z: E})
    return cons


def _linear_residual(flat: _Flat, z, d, p):
    y = z[:d]
    q = math.inf if p == 1.0 else (1.0 if math.isinf(p) else p / (p - 1.0))
    out = 0.0
    if len(flat.A):
        out = max(out, float(np.max((flat.A @ y - flat.b) / pnorm(flat.A, q, axis=1))))
    off = d
    for P in flat.hulls:
        lam = np.clip(z[off:off + len(P)], 0.0, None)
        s = lam.sum()
        if s <= 0:
            return math.inf
        out = max(out, float(pnorm(y - (lam / s) @ P, p)))
        off += len(P)
    return max(out, 0.0)


# --- smooth l_p solver ---------------------------------------------------------

def _hull_weights(flat: _Flat, y):
    return [hull_projection(P, y).weights for P in flat.hulls]


def _slsqp_nearest(p: float, flat: _Flat, x0, y_start, d: int, tol: Tolerances):
    """Minimise |x0 - y|_p^2 over the flattened constraints with SLSQP."""
    nl = sum(len(P) for P in flat.hulls)
    nv = d + nl
    z0 = np.concatenate([np.asarray(y_start, dtype=float)] + _hull_weights(flat, y_start)) \
        if flat.hulls else np.asarray(y_start, dtype=float).copy()
    s = max(1.0, float(pnorm(x0 - z0[:d], p)))

    def f(z):
        n = float(pnorm(x0 - z[:d], p)) / s
        return n * n

    def g(z):
        out = np.zeros(nv)
        v = x0 - z[:d]
        n = float(pnorm(v, p))
        if n > 0:
            out[:d] = -2.0 * (n / (s * s)) * duality_map(v, p)
        return out

    cons = _linear_constraints(flat, d, nv)
    if len(flat.C):
        def ball_fun(z):
            return flat.r - pnorm(z[:d] - flat.C, p)

        def ball_jac(z):
            J = np.zeros((len(flat.C), nv))
            V = z[:d] - flat.C
            nz = np.any(V != 0, axis=1)
            if nz.any():
                J[nz, :d] = -duality_map(V[nz], p)
            return J

        cons.append({"type": "ineq", "fun": ball_fun, "jac": ball_jac})
    bounds = [(None, None)] * d + [(0.0, None)] * nl
    opts = {"ftol": 1e-16, "maxiter": min(tol.maxiter, 2000)}
    res = minimize(f, z0, jac=g, method="SLSQP", bounds=bounds, constraints=cons, options=opts)
    nit = int(res.nit)
    # SLSQP sometimes stops early on flat objectives; restarting rebuilds its
    # quasi-Newton model and usually squeezes out the remaining error
    for _ in range(3):
        again = minimize(f, res.x, jac=g, method="SLSQP", bounds=bounds,
                         constraints=cons, options=opts)
        nit += int(again.nit)
        if again.fun >= res.fun:
            break
        res = again
    z = res.x
    y = z[:d].copy()
    if len(flat.hulls) == 1 and not len(flat.A) and not len(flat.C):
        lam = np.clip(z[d:], 0.0, None)
        y = (lam / lam.sum()) @ flat.hulls[0]
        z = np.concatenate([y, lam / lam.sum()])
    resid = _linear_residual(flat, z, d, p)
    if len(flat.C):
        resid = max(resid, float(np.max(pnorm(y - flat.C, p) - flat.r)))
    resid = max(resid, 0.0)
    ok = resid <= tol.feas and res.status in (0, 8)
    return y, nit, resid, ok, {"slsqp_status": int(res.status), "slsqp_message": str(res.message)}


# --- p in {1, inf}: everything is a linear program ------------------------------

def _lp_nearest(p: float, flat: _Flat, x0, d: int):
    A_ub, b_ub, A_eq, b_eq, bounds, nv = _linear_system(flat, d)
    nb = len(flat.C)
    if p == 1.0:
        extra = d + d * nb  # u >= |x0 - y|, v_j >= |y - c_j|
    else:
        extra = 1  # t >= |x0 - y|_inf
    nv2 = nv + extra
    rows, rhs = [], []
    for i in range(len(A_ub)):
        row = np.zeros(nv2)
        row[:nv] = A_ub[i]
        rows.append(row)
        rhs.append(b_ub[i])
    cost = np.zeros(nv2)
    if p == 1.0:
        for i in range(d):
            for sgn in (1.0, -1.0):
                row = np.zeros(nv2)
                row[i] = -sgn
                row[nv + i] = -1.0
                rows.append(row)
                rhs.append(-sgn * x0[i])
        cost[nv:nv + d] = 1.0
        for j, (c, r) in enumerate(zip(flat.C, flat.r)):
            base = nv + d + j * d
            for i in range(d):
                for sgn in (1.0, -1.0):
                    row = np.zeros(nv2)
                    row[i] = sgn
                    row[base + i] = -1.0
                    rows.append(row)
                    rhs.append(sgn * c[i])
            row = np.zeros(nv2)
            row[base:base + d] = 1.0
            rows.append(row)
            rhs.append(r)
    else:
        t = nv
        for i in range(d):
            for sgn in (1.0, -1.0):
                row = np.zeros(nv2)
                row[i] = -sgn
                row[t] = -1.0
                rows.append(row)
                rhs.append(-sgn * x0[i])
        cost[t] = 1.0
        for c, r in zip(flat.C, flat.r):
            for i in range(d):
                for sgn in (1.0, -1.0):
                    row = np.zeros(nv2)
                    row[i] = sgn
                    rows.append(row)
                    rhs.append(r + sgn * c[i])
    if A_eq is not None:
        A_eq = np.hstack([A_eq, np.zeros((len(A_eq), extra))])
    res = linprog(cost, A_ub=np.array(rows), b_ub=np.array(rhs), A_eq=A_eq, b_eq=b_eq,
                  bounds=bounds + [(0, None)] * extra, method="highs", options=_HIGHS)
    return res


# --- public operations ----------------------------------------------------------

def _check_sets(space, sets):
    for i, s in enumerate(sets):
        check_dim(space, s, f"sets[{i}]")


def contains(space: SpaceSpec, s, x, tol: float = 1e-9) -> bool:
    """Membership of ``x`` in ``s`` up to ``tol`` (measured as a distance)."""
    check_dim(space, s)
    x = as_vector(space, x, "x")
    if isinstance(s, Polytope):
        return all(_halfspace_step(h, x, space.p)[1] <= tol for h in s.halfspaces)
    return distance(space, s, x) <= tol


def distance(space: SpaceSpec, s, x) -> float:
    """Ambient-norm distance from ``x`` to ``s``."""
    check_dim(space, s)
    x = as_vector(space, x, "x")
    if isinstance(s, Halfspace):
        return _halfspace_step(s, x, space.p)[1]
    if isinstance(s, Ball):
        return _ball_step(s, x, space.p)[1]
    return nearest_point(space, s, x).dist


def _result_from_point(space, x0, y, iterations, resid, method, trace, converged=True):
    return NearestPointResult(np.asarray(y, dtype=float), float(pnorm(x0 - y, space.p)),
                              converged, iterations, float(resid), False, method, trace)


def nearest_point(space: SpaceSpec, s, x0, tol: Tolerances | None = None,
                  warm_start=None) -> NearestPointResult:
    """Nearest point of ``s`` to ``x0`` in the ambient norm.

    Parameters
    ----------
    space : SpaceSpec
    s : Halfspace, Ball, Polytope or Hull
    x0 : array_like
    tol : Tolerances, optional
    warm_start : array_like, optional
        Starting point for iterative solvers (l_p mode only).

    Returns
    -------
    NearestPointResult
    """
    check_dim(space, s)
    x0 = as_vector(space, x0, "x0")
    tol = tol or default_tolerances(space)
    p = space.p
    if isinstance(s, Halfspace):
        y, dist = _halfspace_step(s, x0, p)
        return NearestPointResult(y, dist, True, 0, 0.0, False, "closed-form", {})
    if isinstance(s, Ball):
        y, dist = _ball_step(s, x0, p)
        return NearestPointResult(y, dist, True, 0, 0.0, False, "closed-form", {})
    if isinstance(s, Polytope) and len(s.halfspaces) == 1:
        return nearest_point(space, s.halfspaces[0], x0, tol)
    if isinstance(s, Hull) and space.is_euclidean:
        res = hull_projection(s.points, x0)
        return _result_from_point(space, x0, res.point, res.iterations, 0.0, "wolfe",
                                  {"wolfe_converged": res.converged}, res.converged)
    return _intersection(space, [s], x0, tol, warm_start)


def nearest_point_intersection(space: SpaceSpec, sets, x0, tol: Tolerances | None = None,
                               warm_start=None) -> NearestPointResult:
    """Nearest point of the intersection of ``sets`` to ``x0``.

    An empty intersection yields ``infeasible=True``, ``converged=False`` and
    ``dist=inf``. A result with both flags false is indeterminate.
    """
    sets = list(sets)
    if not sets:
        raise InputError("nearest_point_intersection needs at least one set")
    _check_sets(space, sets)
    x0 = as_vector(space, x0, "x0")
    tol = tol or default_tolerances(space)
    if len(sets) == 1:
        return nearest_point(space, sets[0], x0, tol, warm_start)
    return _intersection(space, sets, x0, tol, warm_start)


def _intersection(space, sets, x0, tol, warm_start):
    d = space.dim
    p = space.p
    flat = _flatten(sets, d)
    trace: dict = {"sets": len(sets)}
    if p in (1.0, math.inf):
        res = _lp_nearest(p, flat, x0, d)
        trace["linprog_status"] = int(res.status)
        if res.status == 2:
            return _infeasible(int(getattr(res, "nit", 0)), math.inf, "linprog", trace)
        if res.status != 0:
            return NearestPointResult(None, math.nan, False, 0, math.nan, False, "linprog", trace)
        y = res.x[:d]
        resid = _linear_residual(flat, res.x, d, p)
        if len(flat.C):
            resid = max(resid, float(np.max(pnorm(y - flat.C, p) - flat.r)))
        return _result_from_point(space, x0, y, int(res.nit), max(resid, 0.0), "linprog", trace,
                                  resid <= tol.feas)
    iterations = 0
    if space.is_euclidean and flat.hulls:
        # hull constraints are linear in (y, weights): decide emptiness exactly,
        # then solve the quadratic program directly; Dykstra is the fallback
        _, ok = _linear_feasible_point(flat, d)
        if ok is False:
            trace["linear_feasible"] = False
            return _infeasible(0, math.inf, "linprog", trace)
        y, nit, resid, ok, info = _slsqp_nearest(p, flat, x0, x0, d, tol)
        iterations += nit
        trace.update(info)
        if ok:
            return _result_from_point(space, x0, y, iterations, resid, "slsqp", trace)
    if space.is_euclidean:
        y, cycles, resid, status, method = _dykstra(flat, x0, tol)
        iterations += cycles
        trace.update({"dykstra_cycles": cycles, "dykstra_residual": resid,
                      "dykstra_status": _STATUS_NAMES[status]})
        if status == kernels.STATUS_CONVERGED:
            return _result_from_point(space, x0, y, iterations, resid, method, trace)
        start = y
    else:
        start = x0 if warm_start is None else as_vector(space, warm_start, "warm_start")
        y, nit, resid, ok, info = _slsqp_nearest(p, flat, x0, start, d, tol)
        iterations += nit
        trace.update(info)
        if ok:
            return _result_from_point(space, x0, y, iterations, resid, "slsqp", trace)
        start = y
    gap, y1 = _phase_one(space, flat, d)
    trace["phase_one_gap"] = gap
    if gap > tol.feas:
        return _infeasible(iterations, gap, "phase-one", trace)
    if math.isnan(gap):
        return NearestPointResult(None, math.nan, False, iterations, math.nan, False,
                                  "indeterminate", trace)
    # the set is nonempty: restart the smooth solver from a feasible point
    y2, nit, resid, ok, info = _slsqp_nearest(p, flat, x0, y1, d, tol)
    iterations += nit
    trace.update({"fallback_" + k: v for k, v in info.items()})
    if not ok and start is not None:
        y3, nit3, resid3, ok3, _ = _slsqp_nearest(p, flat, x0, start, d, tol)
        iterations += nit3
        if ok3:
            y2, resid, ok = y3, resid3, ok3
    return _result_from_point(space, x0, y2, iterations, resid, "slsqp-fallback", trace, ok)


@dataclass
class BallTest:
    """Outcome of :func:`intersects_ball`; ``meets`` is None when indeterminate."""

    meets: bool | None
    witness: np.ndarray | None
    result: NearestPointResult

    def __iter__(self):
        yield self.meets
        yield self.witness


def intersects_ball(space: SpaceSpec, sets, ball: Ball, tol: float = 1e-9,
                    solver_tol: Tolerances | None = None) -> BallTest:
    """Does the intersection of ``sets`` meet ``ball``?

    Decided by projecting the ball center onto the intersection: the answer is
    yes iff that distance is at most ``radius + tol``.
    """
    check_dim(space, ball, "ball")
    res = nearest_point_intersection(space, sets, ball.center, solver_tol)
    if res.infeasible:
        return BallTest(False, None, res)
    if not res.converged:
        return BallTest(None, None, res)
    if res.dist <= ball.radius + tol:
        return BallTest(True, res.point, res)
    return BallTest(False, None, res)

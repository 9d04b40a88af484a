"""Independent reference computations used as test oracles.

Nothing here imports the solvers under test: halfspace distances use the
dual-norm formula, general projections go through cvxpy.
"""
import decimal
import math

import numpy as np


def lp_norm(v, p):
    v = np.asarray(v, dtype=float)
    if math.isinf(p):
        return float(np.max(np.abs(v)))
    # decimal has no practical exponent limit, so tiny or huge entries stay exact
    with decimal.localcontext() as ctx:
        ctx.prec = 40
        total = sum((abs(decimal.Decimal(float(x))) ** decimal.Decimal(p) for x in v),
                    decimal.Decimal(0))
        return float(total ** (1 / decimal.Decimal(p)))


def conj(p):
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def halfspace_dist(a, b, x, p):
    """dist_p(x, {<a, y> <= b}) = (<a, x> - b)_+ / |a|_q."""
    return max(float(np.dot(a, x)) - b, 0.0) / lp_norm(a, conj(p))


def wedge_halfspaces(angles_deg, offset=0.5):
    """{<u_i, x> >= offset} written as {<-u_i, x> <= -offset}."""
    out = []
    for ang in angles_deg:
        t = math.radians(ang)
        out.append((-np.array([math.cos(t), math.sin(t)]), -offset))
    return out


def cvx_project(p, sets, x0):
    """Nearest point in the l_p norm via cvxpy; None when infeasible.

    ``sets`` holds tuples ("halfspace", a, b), ("ball", c, r) or ("hull", P).
    """
    import cvxpy as cp

    d = len(x0)
    y = cp.Variable(d)
    cons = []
    for s in sets:
        if s[0] == "halfspace":
            cons.append(s[1] @ y <= s[2])
        elif s[0] == "ball":
            cons.append(cp.norm(y - s[1], p) <= s[2])
        elif s[0] == "hull":
            P = np.asarray(s[1])
            lam = cp.Variable(len(P), nonneg=True)
            cons += [cp.sum(lam) == 1, y == P.T @ lam]
    prob = cp.Problem(cp.Minimize(cp.norm(y - x0, p)), cons)
    prob.solve(solver=cp.CLARABEL)
    if prob.status in ("infeasible", "infeasible_inaccurate"):
        return None
    return np.asarray(y.value), float(prob.value)

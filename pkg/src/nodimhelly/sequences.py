"""The Helly radius sequence r_k and the Caratheodory bound sequence R_k.

    r_1 = 1,  r_{j+1} * zeta-(r_{j+1}) = r_j
    R_1 = 1,  R_{j+1} / zeta+(1 / (R_{j+1} - 1)) = R_j

Both recursions are solved by plain bisection (no derivatives), which keeps
estimated, piecewise-linear hypotenuse functions safe to use.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .errors import ContractError, InputError, PreconditionError
from .moduli import DEFAULT_BUDGET, Budget, ModulusTable, modulus_table
from .space import SpaceSpec

HELLY_R = "helly_r"
CARATHEODORY_R = "caratheodory_R"

EUCLIDEAN_SOURCE = "euclidean_closed_form"
ESTIMATED_SOURCE = "estimated"
CALLABLE_SOURCE = "callable"


class EuclideanZeta:
    """sqrt(1 + t^2): both hypotenuse functions of a Hilbert space."""

    source = EUCLIDEAN_SOURCE

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.sqrt(1.0 + t * t)

    def __repr__(self):
        return "EuclideanZeta()"


def isotonic(values) -> np.ndarray:
    """Least-squares nondecreasing fit (pool adjacent violators)."""
    vals = [float(v) for v in values]
    blocks = []  # [mean, weight]
    for v in vals:
        blocks.append([v, 1])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0]:
            m2, w2 = blocks.pop()
            m1, w1 = blocks.pop()
            blocks.append([(m1 * w1 + m2 * w2) / (w1 + w2), w1 + w2])
    out = []
    for m, w in blocks:
        out.extend([m] * w)
    return np.array(out)


@dataclass(frozen=True)
class PiecewiseLinearZeta:
    """Linear interpolant through (ts, zs), extended past ts[-1] with ``tail_slope``."""

    ts: np.ndarray
    zs: np.ndarray
    tail_slope: float = 1.0
    source: str = ESTIMATED_SOURCE

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        zs = np.asarray(self.zs, dtype=float)
        if ts.ndim != 1 or ts.shape != zs.shape or len(ts) < 2:
            raise InputError("interpolant needs matching 1-D knots, at least two")
        if ts[0] != 0.0 or np.any(np.diff(ts) <= 0):
            raise InputError("knots must start at 0 and increase strictly")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "zs", zs)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.interp(t, self.ts, self.zs)
        tail = self.zs[-1] + self.tail_slope * (t - self.ts[-1])
        return np.where(t > self.ts[-1], tail, inside)

    @classmethod
    def from_values(cls, eps, values, tail_slope=None, source=ESTIMATED_SOURCE):
        """Rectify raw estimates: pin zeta(0) = 1, clamp to >= 1, isotonic projection.

        The default tail continues with the last segment's slope, capped to
        [0, 1] (every hypotenuse function is 1-Lipschitz).
        """
        eps = np.asarray(eps, dtype=float)
        vals = np.asarray(values, dtype=float)
        keep = np.isfinite(vals)
        eps, vals = eps[keep], vals[keep]
        if len(eps) == 0 or eps[0] != 0.0:
            eps = np.concatenate([[0.0], eps])
            vals = np.concatenate([[1.0], vals])
        vals = vals.copy()
        vals[0] = 1.0
        vals = isotonic(np.maximum(vals, 1.0))
        if tail_slope is None:
            tail_slope = float(np.clip((vals[-1] - vals[-2]) / (eps[-1] - eps[-2]), 0.0, 1.0))
        return cls(eps, vals, float(tail_slope), source)

    @classmethod
    def from_table(cls, table: ModulusTable, which: str = "minus", tail_slope=None):
        col = {"minus": table.zeta_minus, "plus": table.zeta_plus}[which]
        if which == "plus" and tail_slope is None:
            # zeta+(t2) <= zeta+(t1) + t2 - t1, so slope 1 keeps an upper bound
            tail_slope = 1.0
        return cls.from_values(table.eps_grid, col, tail_slope)


def _as_array_fn(zeta):
    if isinstance(zeta, (EuclideanZeta, PiecewiseLinearZeta)):
        return zeta
    return np.vectorize(lambda t: float(zeta(float(t))), otypes=[float])


def _source(zeta) -> str:
    return getattr(zeta, "source", CALLABLE_SOURCE)


@dataclass(frozen=True)
class PowerTypeBoundParams:
    """delta(eps) >= C_X * eps^q on [0, 1]."""

    C_X: float
    q: float

    def __post_init__(self):
        if not self.C_X > 0:
            raise InputError(f"C_X must be positive, got {self.C_X}")
        if not self.q >= 2:
            raise InputError(f"q must be >= 2, got {self.q}")

    @property
    def tilde_C_r(self) -> float:
        return max(1.0, 2.0 * (2.0 / (self.q * self.C_X)) ** (1.0 / self.q))


def rk_power_bound(params: PowerTypeBoundParams, k) -> float | np.ndarray:
    """tilde_C_r * k^(-1/q), the power-type upper bound for r_k."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 1):
        raise InputError("k must be >= 1")
    out = params.tilde_C_r * k_arr ** (-1.0 / params.q)
    return float(out) if out.ndim == 0 else out


def fit_power_type(eps, delta_values, q: float, method: str = "envelope") -> PowerTypeBoundParams:
    """Fit C_X in delta(eps) >= C_X eps^q from samples with eps in (0, 1].

    ``envelope`` takes the smallest ratio delta/eps^q, which keeps the
    inequality true on every sample. ``regression`` is the least-squares fit of
    log delta = log C + q log eps with q fixed.
    """
    eps = np.asarray(eps, dtype=float)
    dv = np.asarray(delta_values, dtype=float)
    sel = (eps > 0) & (eps <= 1) & np.isfinite(dv) & (dv > 0)
    if not np.any(sel):
        raise InputError("no usable samples in (0, 1]")
    e, dv = eps[sel], dv[sel]
    if method == "envelope":
        C = float(np.min(dv / e ** q))
    elif method == "regression":
        C = float(np.exp(np.mean(np.log(dv) - q * np.log(e))))
    else:
        raise InputError(f"unknown method {method!r}")
    return PowerTypeBoundParams(C, q)


@dataclass(frozen=True)
class RadiusSequence:
    """r_1..r_K (``kind="helly_r"``) or R_1..R_K (``kind="caratheodory_R"``)."""

    values: np.ndarray
    kind: str
    zeta_source: str
    root_tol: float
    zeta: Callable = field(default=None, repr=False, compare=False)
    _ext: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k: int) -> float:
        """1-based access; indices past the computed prefix are filled lazily."""
        k = int(k)
        if k < 1:
            raise IndexError("sequence indices start at 1")
        if k <= len(self.values):
            return float(self.values[k - 1])
        ext = self._ext.get("values")
        if ext is None or len(ext) < k:
            if self.zeta is None:
                raise IndexError(f"index {k} past the computed prefix and no zeta to extend")
            longer = _solve(self.kind, self.zeta, max(k, 2 * len(self.values)), self.root_tol)
            self._ext["values"] = ext = longer.values
        return float(ext[k - 1])

    def residuals(self) -> np.ndarray:
        if self.zeta is None:
            raise InputError("sequence carries no zeta function")
        f = _as_array_fn(self.zeta)
        v = self.values
        if self.kind == HELLY_R:
            return np.abs(v[1:] * f(v[1:]) - v[:-1])
        return np.abs(v[1:] / f(1.0 / (v[1:] - 1.0)) - v[:-1])

    def to_csv(self, bound: PowerTypeBoundParams | None = None, fh=None) -> str:
        from .io import fmt_float
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        name = "r_k" if self.kind == HELLY_R else "R_k"
        w.writerow(["k", name, "bound"])
        for i, v in enumerate(self.values, start=1):
            b = fmt_float(rk_power_bound(bound, i)) if bound is not None else ""
            w.writerow([i, fmt_float(v), b])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text


def _probe(zeta, lo, hi, n=64):
    t = np.linspace(lo, hi, n)
    return t, np.asarray(_as_array_fn(zeta)(t), dtype=float)


def _solve(kind, zeta, K, root_tol, backend=None):
    kb = kernels.get_backend(backend)
    if kind == HELLY_R:
        if isinstance(zeta, EuclideanZeta):
            vals = kb.rk_euclid(K)
        elif isinstance(zeta, PiecewiseLinearZeta):
            vals = kb.rk_table(zeta.ts, zeta.zs, zeta.tail_slope, K)
        else:
            vals = _generic(kernels._kernels_py._bisect_r, zeta, K)
    else:
        if isinstance(zeta, EuclideanZeta):
            vals = kb.Rk_euclid(K, root_tol)
        elif isinstance(zeta, PiecewiseLinearZeta):
            vals = kb.Rk_table(zeta.ts, zeta.zs, zeta.tail_slope, K, root_tol)
        else:
            vals = _generic(lambda f, t: kernels._kernels_py._bisect_R(f, t, root_tol), zeta, K)
    vals = np.asarray(vals, dtype=float)
    if np.any(np.isnan(vals)):
        j = int(np.argmax(np.isnan(vals)))
        raise PreconditionError(f"bisection bracket failed at index {j + 1}")
    seq = RadiusSequence(vals, kind, _source(zeta), root_tol, zeta)
    res = seq.residuals()
    if len(res) and res.max() > root_tol:
        j = int(np.argmax(res))
        raise ContractError(
            f"residual {res[j]:.3e} at index {j + 2} exceeds root_tol {root_tol:.1e}", seq)
    return seq


def _generic(bisect, zeta, K):
    f = lambda t: float(zeta(t))  # noqa: E731
    out = np.empty(K)
    out[0] = 1.0
    for j in range(1, K):
        out[j] = bisect(f, out[j - 1])
    return out


def rk_sequence(zeta, K: int, root_tol: float = 1e-12, backend=None) -> RadiusSequence:
    """r_1..r_K for a nondecreasing ``zeta`` with zeta(0) = 1."""
    if K < 1:
        raise InputError("K must be >= 1")
    t, z = _probe(zeta, 0.0, 1.0)
    if abs(z[0] - 1.0) > 1e-12 or np.any(z < 1.0 - 1e-12):
        raise PreconditionError("zeta must satisfy zeta(0) = 1 and zeta >= 1")
    if np.any(np.diff(z) < -1e-12):
        raise PreconditionError("zeta must be nondecreasing")
    return _solve(HELLY_R, zeta, int(K), root_tol, backend)


def Rk_sequence(zeta_plus, K: int, root_tol: float = 1e-12, backend=None) -> RadiusSequence:
    """R_1..R_K for ``zeta_plus`` with zeta+(0) = 1 and 1 <= zeta+(tau) <= 1 + tau."""
    if K < 1:
        raise InputError("K must be >= 1")
    t, z = _probe(zeta_plus, 0.0, 8.0, 129)
    if abs(z[0] - 1.0) > 1e-12:
        raise PreconditionError("zeta+ must satisfy zeta+(0) = 1")
    if np.any(z < 1.0 - 1e-12) or np.any(z > 1.0 + t + 1e-9):
        raise PreconditionError("zeta+ must satisfy 1 <= zeta+(tau) <= 1 + tau")
    return _solve(CARATHEODORY_R, zeta_plus, int(K), root_tol, backend)


DEFAULT_MINUS_GRID = np.linspace(0.0, 1.0, 41)
DEFAULT_PLUS_GRID = np.concatenate([np.linspace(0.0, 2.0, 41), np.linspace(2.25, 8.0, 24)])


def zeta_minus_function(space: SpaceSpec, budget: Budget = DEFAULT_BUDGET, grid=None):
    """Closed form in Euclidean mode, otherwise a rectified interpolant of estimates."""
    if space.is_euclidean:
        return EuclideanZeta()
    grid = DEFAULT_MINUS_GRID if grid is None else grid
    table = modulus_table(space, grid, budget, columns=("zeta_minus",))
    return PiecewiseLinearZeta.from_table(table, "minus")


def zeta_plus_function(space: SpaceSpec, budget: Budget = DEFAULT_BUDGET, grid=None):
    if space.is_euclidean:
        return EuclideanZeta()
    grid = DEFAULT_PLUS_GRID if grid is None else grid
    table = modulus_table(space, grid, budget, columns=("zeta_plus",))
    return PiecewiseLinearZeta.from_table(table, "plus")


def helly_radii(space: SpaceSpec, K: int, budget: Budget = DEFAULT_BUDGET,
                root_tol: float = 1e-12) -> RadiusSequence:
    """r_1..r_K for the ambient space."""
    return rk_sequence(zeta_minus_function(space, budget), K, root_tol)


def caratheodory_radii(space: SpaceSpec, K: int, budget: Budget = DEFAULT_BUDGET,
                       root_tol: float = 1e-12) -> RadiusSequence:
    """R_1..R_K for the ambient space."""
    return Rk_sequence(zeta_plus_function(space, budget), K, root_tol)


def power_type_params(space: SpaceSpec, budget: Budget = DEFAULT_BUDGET,
                      grid=None, method: str = "envelope") -> PowerTypeBoundParams:
    """Fit (C_X, q) with q = max(p, 2) from the (estimated) modulus of convexity."""
    space.require_uniformly_convex()
    q = max(space.p, 2.0)
    grid = np.linspace(0.05, 1.0, 20) if grid is None else np.asarray(grid, dtype=float)
    from .moduli import delta
    dv = np.array([delta(space, e, budget) for e in grid])
    return fit_power_type(grid, dv, q, method)


def euclidean_remark_params() -> PowerTypeBoundParams:
    """(C_X, q) = (sqrt(2) - 1, 2), which gives tilde_C_r = 2 sqrt(sqrt(2) + 1) < 4."""
    return PowerTypeBoundParams(math.sqrt(2.0) - 1.0, 2.0)

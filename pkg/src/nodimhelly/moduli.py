"""Moduli of convexity and smoothness and the hypotenuse functions zeta-/zeta+.

In Euclidean mode every quantity has a closed form. In l_p mode the
quantities are estimated by search: a dense angular scan of the unit circle
of l_p^2 (which embeds isometrically into l_p^d as a coordinate plane) plus a
vectorised multi-start local search over full d-dimensional pairs. The
estimates are one-sided: infima are estimated from above, suprema from below.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from . import kernels
from .errors import InputError
from .space import SpaceSpec, duality_map, pnorm

_TAG_DELTA, _TAG_ZMINUS, _TAG_ZPLUS, _TAG_RHO = 0, 1, 2, 3
KIND_DELTA, KIND_ZETA, KIND_RHO = 0, 1, 2


@dataclass(frozen=True)
class Budget:
    """Search effort for the l_p estimators."""

    restarts: int = 64
    iterations: int = 200
    seed: int = 0
    angular_grid: int = 4096


DEFAULT_BUDGET = Budget()


def _check_space(space: SpaceSpec) -> None:
    space.require_uniformly_convex()
    if space.dim < 2:
        raise InputError("moduli need dim >= 2")


def _rng(budget: Budget, tag: int, value: float) -> np.random.Generator:
    key = int(round(value * 1e9))
    return np.random.default_rng([budget.seed, tag, key])


def _circle(theta, p):
    v = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return v / pnorm(v, p)[..., None]


# --- closed forms -------------------------------------------------------------

def delta_euclidean(eps):
    eps = np.asarray(eps, dtype=float)
    return 1.0 - np.sqrt(np.maximum(0.0, 1.0 - eps * eps / 4.0))


def zeta_euclidean(eps):
    eps = np.asarray(eps, dtype=float)
    return np.sqrt(1.0 + eps * eps)


def rho_euclidean(tau):
    tau = np.asarray(tau, dtype=float)
    return np.sqrt(1.0 + tau * tau) - 1.0


# --- two-dimensional scans ----------------------------------------------------

def _tangent(x, p):
    xs = duality_map(x, p)
    t = np.stack([-xs[..., 1], xs[..., 0]], axis=-1)
    return t / pnorm(t, p)[..., None]


def _zeta_2d(p, eps, n, maximize):
    def values(theta, sign):
        x = _circle(theta, p)
        y = sign * _tangent(x, p)
        return pnorm(x + eps * y, p)

    theta = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    best, best_theta, best_sign = None, 0.0, 1.0
    for sign in (1.0, -1.0):
        v = values(theta, sign)
        i = int(np.argmax(v) if maximize else np.argmin(v))
        if best is None or (v[i] > best if maximize else v[i] < best):
            best, best_theta, best_sign = float(v[i]), theta[i], sign
    h = 2.0 * np.pi / n
    s = -1.0 if maximize else 1.0
    res = minimize_scalar(lambda t: s * float(values(np.array([t]), best_sign)[0]),
                          bounds=(best_theta - h, best_theta + h), method="bounded",
                          options={"xatol": 1e-12})
    refined = s * float(res.fun)
    return max(best, refined) if maximize else min(best, refined)


def _chord_angle(p, theta, eps, direction=1.0, iters=60):
    """Offsets s in [0, pi] with ||u(theta) - u(theta + direction*s)|| >= eps, tight (vectorised).

    Relies on the chord length being monotone along the unit circle of a
    normed plane between x and -x.
    """
    x = _circle(theta, p)
    lo = np.zeros_like(theta)
    hi = np.full_like(theta, np.pi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        g = pnorm(x - _circle(theta + direction * mid, p), p)
        below = g < eps
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return hi


def _delta_2d(p, eps, n):
    if eps <= 0.0:
        return 0.0
    theta = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    x = _circle(theta, p)
    best = np.inf
    best_theta, best_dir = 0.0, 1.0
    for direction in (1.0, -1.0):
        s = _chord_angle(p, theta, eps, direction)
        y = _circle(theta + direction * s, p)
        v = 1.0 - pnorm(x + y, p) / 2.0
        i = int(np.argmin(v))
        if v[i] < best:
            best, best_theta, best_dir = float(v[i]), theta[i], direction

    def value(t):
        xt = _circle(np.array([t]), p)[0]

        def chord(a):
            return float(pnorm(xt - _circle(np.array([t + best_dir * a]), p)[0], p)) - eps

        if eps >= 2.0:
            a = np.pi
        else:
            a = brentq(chord, 0.0, np.pi, xtol=1e-15)
        y = _circle(np.array([t + best_dir * a]), p)[0]
        return 1.0 - float(pnorm(xt + y, p)) / 2.0

    h = 2.0 * np.pi / n
    res = minimize_scalar(value, bounds=(best_theta - h, best_theta + h), method="bounded",
                          options={"xatol": 1e-12})
    return min(best, float(res.fun))


def _rho_2d(p, tau, n):
    if tau <= 0.0:
        return 0.0
    m = max(64, int(math.sqrt(n)) * 8)
    th = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    x = _circle(th, p)[:, None, :]
    y = tau * _circle(th, p)[None, :, :]
    v = (pnorm(x + y, p) + pnorm(x - y, p)) / 2.0 - 1.0
    i, j = np.unravel_index(int(np.argmax(v)), v.shape)

    def neg(z):
        xx = _circle(z[0], p)
        yy = tau * _circle(z[1], p)
        return -((float(pnorm(xx + yy, p)) + float(pnorm(xx - yy, p))) / 2.0 - 1.0)

    res = minimize(neg, np.array([th[i], th[j]]), method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
    return max(float(v[i, j]), -float(res.fun))


# --- d-dimensional multi-start local search -----------------------------------

def _local_search(kind, p, d, eps, budget, rng, maximize):
    R = budget.restarts
    Z0 = rng.standard_normal((R, 2 * d))
    Z0 /= np.linalg.norm(Z0.reshape(R, 2, d), axis=2).repeat(d, axis=1)
    noise = rng.standard_normal((budget.iterations, R, 2 * d))
    return float(kernels.backend.modulus_search(kind, p, d, eps, Z0, noise, maximize))


# --- public estimators --------------------------------------------------------

def delta(space: SpaceSpec, eps: float, budget: Budget = DEFAULT_BUDGET) -> float:
    """Modulus of convexity at ``eps``; in l_p mode an upper estimate of the infimum."""
    eps = float(eps)
    if not 0.0 <= eps <= 2.0:
        raise InputError(f"eps must lie in [0, 2], got {eps}")
    if space.is_euclidean:
        return float(delta_euclidean(eps))
    _check_space(space)
    if eps == 0.0:
        return 0.0
    if eps == 2.0:
        # only antipodal unit pairs qualify in a strictly convex space
        return 1.0
    p, d = space.p, space.dim
    best = _delta_2d(p, eps, budget.angular_grid)
    rng = _rng(budget, _TAG_DELTA, eps)
    best = min(best, _local_search(KIND_DELTA, p, d, eps, budget, rng, False))
    return float(min(max(best, 0.0), 1.0))


def zeta_minus(space: SpaceSpec, eps: float, budget: Budget = DEFAULT_BUDGET) -> float:
    """inf ||x + eps*y|| over unit x, unit y quasi-orthogonal to x (upper estimate)."""
    eps = float(eps)
    if eps < 0.0:
        raise InputError(f"eps must be nonnegative, got {eps}")
    if space.is_euclidean:
        return float(zeta_euclidean(eps))
    _check_space(space)
    if eps == 0.0:
        return 1.0
    p, d = space.p, space.dim
    best = _zeta_2d(p, eps, budget.angular_grid, maximize=False)
    rng = _rng(budget, _TAG_ZMINUS, eps)
    best = min(best, _local_search(KIND_ZETA, p, d, eps, budget, rng, False))
    return max(best, 1.0)


def zeta_plus(space: SpaceSpec, eps: float, budget: Budget = DEFAULT_BUDGET) -> float:
    """sup ||x + eps*y|| over the same pairs as :func:`zeta_minus` (lower estimate)."""
    eps = float(eps)
    if eps < 0.0:
        raise InputError(f"eps must be nonnegative, got {eps}")
    if space.is_euclidean:
        return float(zeta_euclidean(eps))
    _check_space(space)
    if eps == 0.0:
        return 1.0
    p, d = space.p, space.dim
    best = _zeta_2d(p, eps, budget.angular_grid, maximize=True)
    rng = _rng(budget, _TAG_ZPLUS, eps)
    best = max(best, _local_search(KIND_ZETA, p, d, eps, budget, rng, True))
    return min(best, 1.0 + eps)


def rho(space: SpaceSpec, tau: float, budget: Budget = DEFAULT_BUDGET) -> float:
    """Modulus of smoothness at ``tau`` (lower estimate of the supremum)."""
    tau = float(tau)
    if tau < 0.0:
        raise InputError(f"tau must be nonnegative, got {tau}")
    if space.is_euclidean:
        return float(rho_euclidean(tau))
    _check_space(space)
    if tau == 0.0:
        return 0.0
    p, d = space.p, space.dim
    best = _rho_2d(p, tau, budget.angular_grid)
    rng = _rng(budget, _TAG_RHO, tau)
    best = max(best, _local_search(KIND_RHO, p, d, tau, budget, rng, True))
    return min(best, tau)


# --- tables -------------------------------------------------------------------

@dataclass
class ModulusTable:
    space: SpaceSpec
    eps_grid: np.ndarray
    delta: np.ndarray
    zeta_minus: np.ndarray
    zeta_plus: np.ndarray
    budget: Budget = field(default_factory=Budget)

    def rows(self):
        for row in zip(self.eps_grid, self.delta, self.zeta_minus, self.zeta_plus):
            yield tuple(float(v) for v in row)

    def to_csv(self, fh=None) -> str:
        from .io import fmt_float
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eps", "delta", "zeta_minus", "zeta_plus"])
        for row in self.rows():
            w.writerow([fmt_float(v) for v in row])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    @classmethod
    def from_csv(cls, text: str, space: SpaceSpec, budget: Budget = DEFAULT_BUDGET):
        rows = list(csv.DictReader(io.StringIO(text)))
        col = lambda k: np.array([float(r[k]) for r in rows])  # noqa: E731
        return cls(space, col("eps"), col("delta"), col("zeta_minus"), col("zeta_plus"), budget)


def modulus_table(space: SpaceSpec, eps_grid, budget: Budget = DEFAULT_BUDGET,
                  columns=("delta", "zeta_minus", "zeta_plus")) -> ModulusTable:
    """Tabulate the moduli on an ascending grid.

    ``delta`` is NaN for grid points above 2. Columns not listed in ``columns``
    are filled with NaN (useful when only one hypotenuse function is needed).
    """
    grid = np.asarray(eps_grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) < 0) or np.any(grid < 0):
        raise InputError("eps_grid must be an ascending array of nonnegative reals")
    nan = np.full(len(grid), np.nan)
    dl = (np.array([delta(space, e, budget) if e <= 2.0 else np.nan for e in grid])
          if "delta" in columns else nan.copy())
    zm = (np.array([zeta_minus(space, e, budget) for e in grid])
          if "zeta_minus" in columns else nan.copy())
    zp = (np.array([zeta_plus(space, e, budget) for e in grid])
          if "zeta_plus" in columns else nan.copy())
    return ModulusTable(space, grid, dl, zm, zp, budget)


# --- equivalence checks -------------------------------------------------------

@dataclass
class EquivalenceReport:
    """Per-eps margins of ``lower <= middle <= upper``."""

    kind: str
    eps: np.ndarray
    lower: np.ndarray
    middle: np.ndarray
    upper: np.ndarray
    slack: float

    @property
    def lower_margin(self) -> np.ndarray:
        return self.middle - self.lower

    @property
    def upper_margin(self) -> np.ndarray:
        return self.upper - self.middle

    @property
    def worst_margin(self) -> float:
        return float(min(self.lower_margin.min(), self.upper_margin.min()))

    @property
    def violations(self) -> list:
        out = []
        for i, e in enumerate(self.eps):
            if self.lower_margin[i] < -self.slack or self.upper_margin[i] < -self.slack:
                out.append({"eps": float(e), "lower": float(self.lower[i]),
                            "middle": float(self.middle[i]), "upper": float(self.upper[i])})
        return out

    @property
    def ok(self) -> bool:
        return not self.violations


def check_convexity_equivalence(space: SpaceSpec, grid, budget: Budget = DEFAULT_BUDGET,
                                slack: float = 1e-3) -> EquivalenceReport:
    """delta(eps/2) <= zeta-(eps) - 1 <= delta(2 eps) on a grid inside [0, 1]."""
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < 0) or np.any(grid > 1):
        raise InputError("grid must lie in [0, 1]")
    lo = np.array([delta(space, e / 2.0, budget) for e in grid])
    mid = np.array([zeta_minus(space, e, budget) - 1.0 for e in grid])
    hi = np.array([delta(space, 2.0 * e, budget) for e in grid])
    return EquivalenceReport("convexity", grid, lo, mid, hi, slack)


def check_smoothness_equivalence(space: SpaceSpec, grid, budget: Budget = DEFAULT_BUDGET,
                                 slack: float = 1e-3) -> EquivalenceReport:
    """rho(eps/4) <= zeta+(eps) - 1 <= rho(2 eps) on a grid inside [0, 1/2]."""
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < 0) or np.any(grid > 0.5):
        raise InputError("grid must lie in [0, 1/2]")
    lo = np.array([rho(space, e / 4.0, budget) for e in grid])
    mid = np.array([zeta_plus(space, e, budget) - 1.0 for e in grid])
    hi = np.array([rho(space, 2.0 * e, budget) for e in grid])
    return EquivalenceReport("smoothness", grid, lo, mid, hi, slack)

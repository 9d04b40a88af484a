"""Finite-dimensional l_p spaces: norms, duality and quasi-orthogonality."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError

EUCLIDEAN = "euclidean"
LP = "lp"


@dataclass(frozen=True)
class SpaceSpec:
    """The ambient space l_p^d.

    ``mode="euclidean"`` pins ``p = 2`` and enables closed-form fast paths
    everywhere downstream. ``mode="lp"`` always goes through the generic
    (numerical) machinery, even when ``p == 2``.
    """

    p: float
    dim: int
    mode: str = LP

    def __post_init__(self):
        if self.mode not in (EUCLIDEAN, LP):
            raise InputError(f"unknown mode {self.mode!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise InputError(f"dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        p = float(self.p)
        if math.isnan(p) or p < 1.0:
            raise InputError(f"exponent p must lie in [1, inf], got {self.p!r}")
        if self.mode == EUCLIDEAN and p != 2.0:
            raise InputError("euclidean mode requires p = 2")
        object.__setattr__(self, "p", p)

    @classmethod
    def euclidean(cls, dim: int) -> "SpaceSpec":
        return cls(2.0, dim, EUCLIDEAN)

    @classmethod
    def lp(cls, p: float, dim: int) -> "SpaceSpec":
        return cls(p, dim, LP)

    @property
    def is_euclidean(self) -> bool:
        return self.mode == EUCLIDEAN

    @property
    def q(self) -> float:
        """Conjugate exponent, 1/p + 1/q = 1."""
        if self.p == 1.0:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    @property
    def uniformly_convex(self) -> bool:
        return 1.0 < self.p < math.inf

    def require_uniformly_convex(self) -> None:
        if not self.uniformly_convex:
            raise InputError(
                f"p = {self.p} is not in (1, inf); uniform convexity is required")

    def to_dict(self) -> dict:
        return {"p": self.p, "dim": self.dim, "mode": self.mode}

    @classmethod
    def from_dict(cls, data: dict) -> "SpaceSpec":
        mode = data.get("mode", LP)
        p = data.get("p", 2.0)
        return cls(p, data["dim"], mode)


def as_vector(space: SpaceSpec, v, name: str = "v") -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (space.dim,):
        raise InputError(
            f"{name} has shape {arr.shape}, expected ({space.dim},)")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    return arr


def pnorm(v, p: float, axis: int = -1) -> np.ndarray | float:
    """Vectorised l_p norm along ``axis``; accepts p in [1, inf]."""
    a = np.abs(np.asarray(v, dtype=float))
    if math.isinf(p):
        return a.max(axis=axis)
    if p == 1.0:
        return a.sum(axis=axis)
    m = a.max() if a.size else 0.0
    # the unscaled sum is safe while m^p stays well inside the float range
    if m == 0.0 or 10.0 ** (-280.0 / p) < m < 10.0 ** (280.0 / p):
        if p == 2.0:
            return np.sqrt((a * a).sum(axis=axis))
        return (a ** p).sum(axis=axis) ** (1.0 / p)
    # scale by the max entry so extreme magnitudes cannot over- or underflow
    m = a.max(axis=axis, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    s = ((a / safe) ** p).sum(axis=axis)
    return np.squeeze(safe, axis=axis) * s ** (1.0 / p)


def norm(space: SpaceSpec, v) -> float:
    """Ambient norm ||v||_p."""
    return float(pnorm(as_vector(space, v), space.p))


def dual_norm(space: SpaceSpec, f) -> float:
    """Dual norm ||f||_q of a functional given by its coordinates."""
    return float(pnorm(as_vector(space, f, "f"), space.q))


def duality_map(x: np.ndarray, p: float) -> np.ndarray:
    """Norming functionals for a batch of nonzero rows of ``x`` (1 < p < inf).

    Row i of the result is sign(x_i)|x_i|^(p-1) / ||x||_p^(p-1).
    """
    x = np.asarray(x, dtype=float)
    if p == 2.0:
        return x / pnorm(x, 2.0)[..., None]
    nx = pnorm(x, p)[..., None]
    u = x / nx
    return np.sign(u) * np.abs(u) ** (p - 1.0)


def norming_functional(space: SpaceSpec, x) -> np.ndarray:
    """The unique unit functional x* with <x*, x> = ||x||."""
    x = as_vector(space, x, "x")
    if not space.uniformly_convex:
        raise InputError("norming functional is unique only for 1 < p < inf")
    if not np.any(x):
        raise DomainError("the zero vector has no norming functional")
    return duality_map(x, space.p)


def is_quasi_orthogonal(space: SpaceSpec, y, x, tol: float = 1e-12) -> bool:
    """Birkhoff-James orthogonality of x to y, i.e. y quasi-orthogonal to x."""
    y = as_vector(space, y, "y")
    xs = norming_functional(space, x)
    return abs(float(xs @ y)) <= tol

"""Convex set representations and their JSON encoding."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InputError
from .space import SpaceSpec


def _vec(v, dim, path):
    try:
        arr = np.asarray(v, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{path}: expected a list of numbers") from None
    if arr.ndim != 1 or (dim is not None and arr.shape[0] != dim):
        raise InputError(f"{path}: expected a vector of length {dim}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{path}: non-finite entry")
    return arr


def _num(v, path):
    try:
        x = float(v)
    except (TypeError, ValueError):
        raise InputError(f"{path}: expected a number") from None
    if not np.isfinite(x):
        raise InputError(f"{path}: non-finite value")
    return x


@dataclass(frozen=True, eq=False)
class Halfspace:
    """The closed halfspace {x : <a, x> <= b}."""

    a: np.ndarray
    b: float

    def __post_init__(self):
        a = _vec(self.a, None, "a")
        if not np.any(a):
            raise InputError("halfspace normal a must be nonzero")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", _num(self.b, "b"))

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def scaled(self, s: float) -> "Halfspace":
        return Halfspace(self.a, self.b * s)

    def to_dict(self) -> dict:
        return {"type": "halfspace", "a": self.a.tolist(), "b": self.b}


@dataclass(frozen=True, eq=False)
class Ball:
    """The closed ball of the ambient norm around ``center``."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = _vec(self.center, None, "center")
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        r = _num(self.radius, "radius")
        if r < 0:
            raise InputError("ball radius must be nonnegative")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def scaled(self, s: float) -> "Ball":
        return Ball(self.center * s, self.radius * s)

    def to_dict(self) -> dict:
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class Polytope:
    """A finite intersection of halfspaces."""

    halfspaces: tuple

    def __post_init__(self):
        hs = tuple(self.halfspaces)
        if not hs:
            raise InputError("polytope needs at least one halfspace")
        if any(not isinstance(h, Halfspace) for h in hs):
            raise InputError("polytope members must be Halfspace instances")
        if len({h.dim for h in hs}) != 1:
            raise InputError("polytope halfspaces disagree on dimension")
        object.__setattr__(self, "halfspaces", hs)

    @property
    def dim(self) -> int:
        return self.halfspaces[0].dim

    @property
    def A(self) -> np.ndarray:
        return np.array([h.a for h in self.halfspaces])

    @property
    def bvec(self) -> np.ndarray:
        return np.array([h.b for h in self.halfspaces])

    def scaled(self, s: float) -> "Polytope":
        return Polytope(tuple(h.scaled(s) for h in self.halfspaces))

    def to_dict(self) -> dict:
        return {"type": "polytope", "halfspaces": [h.to_dict() for h in self.halfspaces]}


@dataclass(frozen=True, eq=False)
class Hull:
    """Convex hull of finitely many points (rows of ``points``)."""

    points: np.ndarray

    def __post_init__(self):
        try:
            P = np.array(self.points, dtype=float, ndmin=2)
        except (TypeError, ValueError):
            raise InputError("hull points must be a list of equal-length vectors") from None
        if P.ndim != 2 or P.shape[0] == 0:
            raise InputError("hull needs at least one point")
        if not np.all(np.isfinite(P)):
            raise InputError("hull points must be finite")
        P.setflags(write=False)
        object.__setattr__(self, "points", P)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def scaled(self, s: float) -> "Hull":
        return Hull(self.points * s)

    def to_dict(self) -> dict:
        return {"type": "hull", "points": self.points.tolist()}


ConvexSet = Union[Halfspace, Ball, Polytope, Hull]
SET_TYPES = (Halfspace, Ball, Polytope, Hull)


def check_dim(space: SpaceSpec, s, path: str = "set") -> None:
    if not isinstance(s, SET_TYPES):
        raise InputError(f"{path}: not a convex set ({type(s).__name__})")
    if s.dim != space.dim:
        raise InputError(f"{path}: dimension {s.dim} does not match space dimension {space.dim}")


def set_to_dict(s) -> dict:
    return s.to_dict()


def set_from_dict(data, dim: int | None = None, path: str = "set"):
    """Decode one set from its JSON object, reporting the offending path on error."""
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected an object")
    kind = data.get("type")
    try:
        if kind == "halfspace":
            a = _vec(data.get("a"), dim, f"{path}.a")
            if not np.any(a):
                raise InputError(f"{path}.a: halfspace normal must be nonzero")
            return Halfspace(a, _num(data.get("b"), f"{path}.b"))
        if kind == "ball":
            c = _vec(data.get("center"), dim, f"{path}.center")
            r = _num(data.get("radius"), f"{path}.radius")
            if r < 0:
                raise InputError(f"{path}.radius: must be nonnegative")
            return Ball(c, r)
        if kind == "polytope":
            hs = data.get("halfspaces")
            if not isinstance(hs, list) or not hs:
                raise InputError(f"{path}.halfspaces: expected a nonempty list")
            members = []
            for i, h in enumerate(hs):
                m = set_from_dict(h, dim, f"{path}.halfspaces[{i}]")
                if not isinstance(m, Halfspace):
                    raise InputError(f"{path}.halfspaces[{i}]: expected a halfspace")
                members.append(m)
            return Polytope(tuple(members))
        if kind == "hull":
            pts = data.get("points")
            if not isinstance(pts, list) or not pts:
                raise InputError(f"{path}.points: expected a nonempty list")
            rows = [_vec(v, dim, f"{path}.points[{i}]") for i, v in enumerate(pts)]
            if len({len(r) for r in rows}) != 1:
                raise InputError(f"{path}.points: vectors of different lengths")
            return Hull(np.array(rows))
    except InputError as exc:
        if str(exc).startswith(path):
            raise
        raise InputError(f"{path}: {exc}") from None
    raise InputError(f"{path}.type: unknown set type {kind!r}")

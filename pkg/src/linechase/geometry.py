"""Euclidean primitives in R^d: points, lines, planes and direct similarities.

Points are plain float64 numpy vectors.  Lines carry a unit direction whose
sign is canonical (first nonzero component positive), so a line has exactly
one representation per base point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateInput, InvalidInput

PARALLEL_TOL = 1e-12
DEGENERACY_TOL = 1e-12


def as_point(coords) -> np.ndarray:
    p = np.asarray(coords, dtype=np.float64)
    if p.ndim != 1 or p.shape[0] < 2:
        raise InvalidInput(f"point must be a vector of length >= 2, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InvalidInput(f"point has non-finite coordinates: {p}")
    return p


def _check_dims(*vecs):
    d = vecs[0].shape[0]
    for v in vecs[1:]:
        if v.shape[0] != d:
            raise InvalidInput(f"dimension mismatch: {d} vs {v.shape[0]}")


def canonical_direction(v) -> np.ndarray:
    v = np.array(v, dtype=np.float64)
    n = math.sqrt(float(v @ v))
    if n == 0.0 or not math.isfinite(n):
        raise InvalidInput("direction vector must be nonzero and finite")
    # leave already-unit vectors bit-identical so serialization round-trips
    if abs(n - 1.0) > 1e-15:
        v = v / n
    nz = np.flatnonzero(v)
    if v[nz[0]] < 0:
        v = -v
    return v


@dataclass(frozen=True, eq=False)
class Line:
    base: np.ndarray
    dir: np.ndarray

    def __post_init__(self):
        base = as_point(self.base)
        d = canonical_direction(self.dir)
        _check_dims(base, d)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "dir", d)

    @classmethod
    def through(cls, p, q) -> "Line":
        p, q = as_point(p), as_point(q)
        return cls(p, q - p)

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    def point_at(self, t: float) -> np.ndarray:
        return self.base + t * self.dir

    def param_of(self, p) -> float:
        """Line parameter of the orthogonal projection of ``p``."""
        return float((p - self.base) @ self.dir)

    def __repr__(self):
        return f"Line(base={self.base.tolist()}, dir={self.dir.tolist()})"


@dataclass(frozen=True, eq=False)
class Plane:
    """A 2-plane in R^d with an orthonormal in-plane basis (u, v)."""

    origin: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def to_local(self, p) -> np.ndarray:
        w = p - self.origin
        return np.array([w @ self.u, w @ self.v])

    def to_global(self, xy) -> np.ndarray:
        return self.origin + xy[0] * self.u + xy[1] * self.v

    def project(self, p) -> np.ndarray:
        return self.to_global(self.to_local(p))


@dataclass(frozen=True, eq=False)
class DirectSimilarity:
    """p -> scale * rotation @ p + translation, with det(rotation) = +1."""

    rotation: np.ndarray
    translation: np.ndarray
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise InvalidInput("similarity scale must be positive")

    @classmethod
    def identity(cls, dim: int) -> "DirectSimilarity":
        return cls(np.eye(dim), np.zeros(dim), 1.0)

    @classmethod
    def random(cls, rng: np.random.Generator, dim: int,
               scale_range=(1e-3, 1e3), shift: float = 10.0) -> "DirectSimilarity":
        q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        lo, hi = np.log(scale_range[0]), np.log(scale_range[1])
        scale = float(np.exp(rng.uniform(lo, hi)))
        return cls(q, rng.uniform(-shift, shift, dim), scale)

    @property
    def dim(self) -> int:
        return self.translation.shape[0]

    def __call__(self, p) -> np.ndarray:
        return self.scale * (self.rotation @ p) + self.translation

    def inverse(self) -> "DirectSimilarity":
        rt = self.rotation.T
        return DirectSimilarity(rt, -(rt @ self.translation) / self.scale, 1.0 / self.scale)

    def compose(self, other: "DirectSimilarity") -> "DirectSimilarity":
        """self after other."""
        return DirectSimilarity(
            self.rotation @ other.rotation,
            self(other.translation),
            self.scale * other.scale,
        )


def distance(p, q) -> float:
    p, q = np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64)
    _check_dims(p, q)
    return math.sqrt(float((p - q) @ (p - q)))


def project_point_onto_line(p, line: Line) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    _check_dims(p, line.base)
    return line.base + float((p - line.base) @ line.dir) * line.dir


def point_line_distance(p, line: Line) -> float:
    w = p - line.base
    perp = w - float(w @ line.dir) * line.dir
    return math.sqrt(float(perp @ perp))


def on_line(p, line: Line, tol: float = DEGENERACY_TOL) -> bool:
    return point_line_distance(p, line) <= tol * (1.0 + math.sqrt(float(p @ p)))


def cross2(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def intersect_params_2d(l1: Line, l2: Line, parallel_tol: float = PARALLEL_TOL):
    """Parameters (t1, t2) with l1.point_at(t1) == l2.point_at(t2), or None."""
    den = cross2(l1.dir, l2.dir)
    if abs(den) <= parallel_tol:
        return None
    w = l2.base - l1.base
    return cross2(w, l2.dir) / den, cross2(w, l1.dir) / den


def intersect_lines_2d(l1: Line, l2: Line, parallel_tol: float = PARALLEL_TOL) -> Optional[np.ndarray]:
    if l1.dim != 2 or l2.dim != 2:
        raise InvalidInput("intersect_lines_2d needs 2-dimensional lines")
    params = intersect_params_2d(l1, l2, parallel_tol)
    if params is None:
        return None
    return l1.point_at(params[0])


def plane_through_line_and_point(line: Line, p, tol: float = DEGENERACY_TOL) -> Plane:
    """Plane containing ``line`` and ``p``; u is the line direction."""
    p = np.asarray(p, dtype=np.float64)
    _check_dims(p, line.base)
    w = p - line.base
    perp = w - float(w @ line.dir) * line.dir
    n = math.sqrt(float(perp @ perp))
    if n <= tol * (1.0 + math.sqrt(float(p @ p))):
        raise DegenerateInput("point lies on the line; plane is not determined")
    return Plane(line.base.copy(), line.dir.copy(), perp / n)


def project_line_onto_plane(line: Line, plane: Plane, tol: float = DEGENERACY_TOL) -> Optional[Line]:
    """Orthogonal image of ``line`` in the plane's 2D coordinates, None if it is a point."""
    _check_dims(line.base, plane.origin)
    base2 = plane.to_local(line.base)
    dir2 = np.array([line.dir @ plane.u, line.dir @ plane.v])
    if math.hypot(dir2[0], dir2[1]) <= tol:
        return None
    return Line(base2, dir2)


def apply_similarity(f: DirectSimilarity, p) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    _check_dims(p, f.translation)
    return f(p)


def apply_similarity_line(f: DirectSimilarity, line: Line) -> Line:
    return Line(f(line.base), f.rotation @ line.dir)


def rotation_2d(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def canonical_similarity(p0, l1: Line) -> DirectSimilarity:
    """The unique direct similarity g with g(p0) = (0, 1) and g(l1) = x-axis."""
    p0 = as_point(p0)
    if p0.shape[0] != 2 or l1.dim != 2:
        raise InvalidInput("canonical_similarity is defined in the plane")
    foot = project_point_onto_line(p0, l1)
    w = p0 - foot
    h = math.hypot(w[0], w[1])
    if h <= DEGENERACY_TOL * (1.0 + math.hypot(p0[0], p0[1])):
        raise DegenerateInput("p0 lies on l1")
    # rotate w onto +y
    rot = rotation_2d(math.pi / 2 - math.atan2(w[1], w[0]))
    scale = 1.0 / h
    return DirectSimilarity(rot, -scale * (rot @ foot), scale)


def reflect_across_line_2d(p, line: Line) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.shape[0] != 2 or line.dim != 2:
        raise InvalidInput("reflect_across_line_2d is defined in the plane")
    return 2.0 * project_point_onto_line(p, line) - p

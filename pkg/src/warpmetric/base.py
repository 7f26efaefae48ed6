"""Base fibers, product points and the two reference metrics on M = [t0, t1] x fiber.

The fiber is one-dimensional: either a closed interval ``[0, L]`` or a circle
of circumference ``L``.  All values are plain floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, UsageError

SQRT2 = math.sqrt(2.0)
_EDGE_EPS = 1e-12


@dataclass(frozen=True)
class BaseSpec:
    """A one-dimensional fiber.

    ``kind`` is ``"interval"`` (coordinates in ``[0, length]``) or ``"circle"``
    (coordinates taken mod ``length``).
    """

    kind: str = "interval"
    length: float = 1.0

    def __post_init__(self):
        if self.kind not in ("interval", "circle"):
            raise UsageError(f"unknown base kind {self.kind!r}")
        if not (math.isfinite(self.length) and self.length > 0):
            raise UsageError(f"base length must be positive and finite, got {self.length}")

    @property
    def periodic(self) -> bool:
        return self.kind == "circle"

    @property
    def diameter(self) -> float:
        return self.length / 2 if self.periodic else self.length

    def normalize(self, a: float) -> float:
        """Validate a fiber coordinate, reducing it mod L on the circle."""
        a = float(a)
        if not math.isfinite(a):
            raise DomainError(f"fiber coordinate {a} is not finite")
        if self.periodic:
            r = a % self.length
            # a tiny negative input can round up to exactly L
            return 0.0 if r >= self.length else r
        if a < -_EDGE_EPS * self.length or a > self.length * (1 + _EDGE_EPS):
            raise DomainError(f"fiber coordinate {a} outside [0, {self.length}]")
        return min(max(a, 0.0), self.length)

    def signed_delta(self, a: float, b: float) -> float:
        """Signed displacement of the fiber geodesic from ``a`` to ``b``.

        On the circle this is the shorter arc; antipodal ties go in the
        increasing direction.
        """
        if not self.periodic:
            return b - a
        L = self.length
        d = b - a
        if abs(d) >= L:
            d = math.fmod(d, L)
        # shift by a whole turn only when needed so tiny differences stay exact
        if d > L / 2:
            d -= L
        elif d <= -L / 2:
            d += L
        return d


def base_distance(a: float, b: float, base: BaseSpec) -> float:
    """Fiber distance between coordinates ``a`` and ``b``."""
    a = base.normalize(a)
    b = base.normalize(b)
    d = abs(b - a)
    if base.periodic:
        return min(d, base.length - d)
    return d


class SpacePoint(NamedTuple):
    """A point ``(x, fiber)`` of the product space."""

    x: float
    fiber: float


@dataclass(frozen=True)
class ProductSpec:
    """The product ``[t0, t1] x fiber``."""

    t0: float = 0.0
    t1: float = 1.0
    base: BaseSpec = BaseSpec()

    def __post_init__(self):
        if not (math.isfinite(self.t0) and math.isfinite(self.t1)):
            raise UsageError("t0 and t1 must be finite")
        if not self.t1 > self.t0:
            raise UsageError(f"need t0 < t1, got {self.t0}, {self.t1}")

    @property
    def width(self) -> float:
        return self.t1 - self.t0

    def point(self, x: float, fiber: float) -> SpacePoint:
        """Build a validated point (circle coordinates reduced mod L)."""
        x = float(x)
        tol = _EDGE_EPS * max(1.0, abs(self.t0), abs(self.t1))
        if not math.isfinite(x) or x < self.t0 - tol or x > self.t1 + tol:
            raise DomainError(f"x = {x} outside [{self.t0}, {self.t1}]")
        return SpacePoint(min(max(x, self.t0), self.t1), self.base.normalize(fiber))

    def check(self, p: Sequence[float]) -> SpacePoint:
        return self.point(p[0], p[1])


UNIT_SQUARE = ProductSpec(0.0, 1.0, BaseSpec("interval", 1.0))


def product_distance(p, q, spec: ProductSpec = UNIT_SQUARE) -> float:
    """Generalized Euclidean distance ``sqrt(dx^2 + d_fiber^2)``."""
    p = spec.check(p)
    q = spec.check(q)
    return math.hypot(q.x - p.x, base_distance(p.fiber, q.fiber, spec.base))


def taxi_distance(p, q, spec: ProductSpec = UNIT_SQUARE) -> float:
    """Generalized taxi distance ``|dx| + d_fiber``."""
    p = spec.check(p)
    q = spec.check(q)
    return abs(q.x - p.x) + base_distance(p.fiber, q.fiber, spec.base)


def fiber_gaps(yp, yq, base: BaseSpec) -> np.ndarray:
    """Vectorized fiber distance for arrays of coordinates."""
    d = np.abs(np.asarray(yq, dtype=float) - np.asarray(yp, dtype=float))
    if base.periodic:
        d = np.mod(d, base.length)
        d = np.minimum(d, base.length - d)
    return d


def product_distance_array(xp, yp, xq, yq, spec: ProductSpec = UNIT_SQUARE) -> np.ndarray:
    """Vectorized :func:`product_distance` (inputs assumed in-domain)."""
    return np.hypot(np.asarray(xq, float) - np.asarray(xp, float), fiber_gaps(yp, yq, spec.base))


def taxi_distance_array(xp, yp, xq, yq, spec: ProductSpec = UNIT_SQUARE) -> np.ndarray:
    """Vectorized :func:`taxi_distance` (inputs assumed in-domain)."""
    return np.abs(np.asarray(xq, float) - np.asarray(xp, float)) + fiber_gaps(yp, yq, spec.base)


@dataclass(frozen=True)
class CurvePolyline:
    """Piecewise-linear curve: straight in x, fiber geodesic between vertices."""

    vertices: tuple[SpacePoint, ...]

    def __post_init__(self):
        if len(self.vertices) < 1:
            raise UsageError("a polyline needs at least one vertex")
        object.__setattr__(self, "vertices", tuple(SpacePoint(float(v[0]), float(v[1])) for v in self.vertices))

    @classmethod
    def through(cls, points: Iterable[Sequence[float]]) -> "CurvePolyline":
        return cls(tuple(SpacePoint(float(a), float(b)) for a, b in points))

    @property
    def start(self) -> SpacePoint:
        return self.vertices[0]

    @property
    def end(self) -> SpacePoint:
        return self.vertices[-1]

    def __len__(self) -> int:
        return len(self.vertices)

    def euclidean_length(self, spec: ProductSpec = UNIT_SQUARE) -> float:
        total = 0.0
        for a, b in zip(self.vertices, self.vertices[1:]):
            total += math.hypot(b.x - a.x, spec.base.signed_delta(a.fiber, b.fiber))
        return total


def generalized_line(p, q, spec: ProductSpec = UNIT_SQUARE) -> CurvePolyline:
    """The generalized line from ``p`` to ``q`` as a one-segment polyline.

    The fiber part follows the fiber geodesic, so on the circle the segment
    may cross the wraparound point; ``p == q`` gives a single vertex.
    """
    p = spec.check(p)
    q = spec.check(q)
    if p == q:
        return CurvePolyline((p,))
    return CurvePolyline((p, q))

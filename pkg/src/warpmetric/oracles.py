"""Closed-form limit metrics on the unit square and the two-point metric handle."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .base import UNIT_SQUARE, ProductSpec, product_distance, product_distance_array, taxi_distance, \
    taxi_distance_array
from .errors import UsageError

Evaluator = Callable[[object, object], float]


@dataclass(frozen=True)
class MetricHandle:
    """A two-point metric with a label and a declared accuracy.

    ``exactness`` is ``"closed_form"`` (``budget`` 0) or ``"solver_backed"``
    (each value within ``budget`` of the true metric, see ``measure`` for a
    per-pair bound).  ``batch`` optionally evaluates arrays of coordinates.
    """

    evaluator: Evaluator
    name: str
    exactness: str = "closed_form"
    budget: float = 0.0
    batch: Optional[Callable] = None
    measure: Optional[Callable] = None
    spec: ProductSpec = field(default=UNIT_SQUARE)

    def __post_init__(self):
        if self.exactness not in ("closed_form", "solver_backed"):
            raise UsageError(f"unknown exactness {self.exactness!r}")
        if self.budget < 0:
            raise UsageError("budget must be nonnegative")

    def __call__(self, p, q) -> float:
        return self.evaluator(p, q)

    def pair_bound(self, p, q) -> tuple[float, float]:
        """``(value, error bound)`` for one pair."""
        if self.measure is not None:
            return self.measure(p, q)
        return self.evaluator(p, q), self.budget

    def many(self, pairs) -> np.ndarray:
        """Evaluate a sequence of ``(p, q)`` pairs, vectorized when possible."""
        pairs = list(pairs)
        if not pairs:
            return np.zeros(0)
        if self.batch is not None:
            arr = np.asarray([(p[0], p[1], q[0], q[1]) for p, q in pairs], dtype=float)
            return np.asarray(self.batch(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]), dtype=float)
        return np.array([self.evaluator(p, q) for p, q in pairs], dtype=float)


def oracle_quotient(p, q) -> float:
    """Limit metric with the line ``x = 0`` collapsed to a point: ``min(d, x_p + x_q)``."""
    p = UNIT_SQUARE.check(p)
    q = UNIT_SQUARE.check(q)
    return min(math.hypot(q.x - p.x, q.fiber - p.fiber), p.x + q.x)


def _quotient_batch(xp, yp, xq, yq):
    return np.minimum(product_distance_array(xp, yp, xq, yq), np.asarray(xp) + np.asarray(xq))


def oracle_blowup(p, q) -> float:
    """Limit metric where fiber motion is forbidden on ``x < 1/2``.

    Inside the forbidden half only horizontal travel is finite, so routes
    between distinct fibers pass through the line ``x = 1/2``.
    """
    p = UNIT_SQUARE.check(p)
    q = UNIT_SQUARE.check(q)
    # fixed argument order keeps the rounding, and so the value, symmetric
    (x1, y1), (x2, y2) = sorted((tuple(p), tuple(q)))
    if x1 >= 0.5 and x2 >= 0.5:
        return math.hypot(x2 - x1, y2 - y1)
    if x1 < 0.5 and x2 < 0.5:
        if y1 == y2:
            return abs(x2 - x1)
        return (0.5 - x1) + abs(y2 - y1) + (0.5 - x2)
    if x1 < 0.5:
        return (0.5 - x1) + math.hypot(x2 - 0.5, y2 - y1)
    return (0.5 - x2) + math.hypot(x1 - 0.5, y2 - y1)


def _blowup_batch(xp, yp, xq, yq):
    xp, yp, xq, yq = (np.asarray(a, dtype=float) for a in (xp, yp, xq, yq))
    lp, lq = xp < 0.5, xq < 0.5
    dy = np.abs(yq - yp)
    both_right = np.hypot(xq - xp, dy)
    both_left = np.where(dy == 0, np.abs(xq - xp), (0.5 - xp) + dy + (0.5 - xq))
    p_left = (0.5 - xp) + np.hypot(xq - 0.5, dy)
    q_left = (0.5 - xq) + np.hypot(xp - 0.5, dy)
    return np.where(lp & lq, both_left, np.where(lp, p_left, np.where(lq, q_left, both_right)))


def _euclid(p, q):
    return product_distance(p, q)


def _taxi(p, q):
    return taxi_distance(p, q)


_ORACLES = {
    "euclid": (_euclid, product_distance_array),
    "taxi": (_taxi, taxi_distance_array),
    "quotient": (oracle_quotient, _quotient_batch),
    "blowup": (oracle_blowup, _blowup_batch),
}
ORACLE_NAMES = tuple(_ORACLES)


def oracle_lookup(name: str) -> MetricHandle:
    """Closed-form handle for ``euclid``, ``taxi``, ``quotient`` or ``blowup``."""
    try:
        ev, batch = _ORACLES[name]
    except KeyError:
        raise UsageError(f"unknown oracle {name!r}; choose from {', '.join(ORACLE_NAMES)}") from None
    return MetricHandle(ev, name, "closed_form", 0.0, batch=batch)

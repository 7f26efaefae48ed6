"""Piecewise-constant warping functions and the example families.

A :class:`WarpProfile` is constant on half-open strips ``[b_i, b_{i+1})``
(the last strip is closed at ``t1``) and may carry isolated point values.
Point values have measure zero: they only change the cost of a segment that
runs purely along the fiber at exactly that abscissa.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, UsageError

FAMILIES = ("constant", "s_n", "h_n", "z_n", "k_n", "w_n", "v_n")


def _positive(v: float, what: str) -> float:
    v = float(v)
    if not (math.isfinite(v) and v > 0):
        raise UsageError(f"{what} must be positive and finite, got {v}")
    return v


@dataclass(frozen=True)
class WarpProfile:
    breakpoints: tuple[float, ...]
    strip_values: tuple[float, ...]
    point_overrides: tuple[tuple[float, float], ...] = ()
    label: str = ""
    _override_map: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        vals = tuple(_positive(v, "strip value") for v in self.strip_values)
        if len(bps) < 2:
            raise UsageError("need at least two breakpoints")
        if any(not math.isfinite(b) for b in bps):
            raise UsageError("breakpoints must be finite")
        if any(b1 <= b0 for b0, b1 in zip(bps, bps[1:])):
            raise UsageError(f"breakpoints must be strictly increasing: {bps}")
        if len(vals) != len(bps) - 1:
            raise UsageError(f"{len(bps)} breakpoints need {len(bps) - 1} values, got {len(vals)}")
        raw = self.point_overrides
        if isinstance(raw, Mapping):
            raw = raw.items()
        ovs = {}
        for key, value in raw:
            key = float(key)
            if not (bps[0] <= key <= bps[-1]):
                raise UsageError(f"override abscissa {key} outside [{bps[0]}, {bps[-1]}]")
            ovs[key] = _positive(value, "override value")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "strip_values", vals)
        object.__setattr__(self, "point_overrides", tuple(sorted(ovs.items())))
        object.__setattr__(self, "_override_map", ovs)

    @classmethod
    def constant(cls, value: float = 1.0, t0: float = 0.0, t1: float = 1.0, label: str = "") -> "WarpProfile":
        return cls((t0, t1), (value,), label=label or f"constant({value:g})")

    @property
    def t0(self) -> float:
        return self.breakpoints[0]

    @property
    def t1(self) -> float:
        return self.breakpoints[-1]

    @property
    def overrides(self) -> dict:
        return dict(self._override_map)

    @property
    def special_abscissae(self) -> tuple[float, ...]:
        """Breakpoints and override keys, sorted."""
        return tuple(sorted(set(self.breakpoints) | set(self._override_map)))

    def _check(self, x: float) -> float:
        x = float(x)
        if not (self.t0 <= x <= self.t1):
            raise DomainError(f"x = {x} outside [{self.t0}, {self.t1}]")
        return x

    def strip_index(self, x: float) -> int:
        """Index of the half-open strip containing ``x`` (last strip closed)."""
        x = self._check(x)
        return min(bisect_right(self.breakpoints, x) - 1, len(self.strip_values) - 1)

    def evaluate(self, x: float) -> float:
        x = self._check(x)
        ov = self._override_map.get(x)
        if ov is not None:
            return ov
        return self.strip_values[self.strip_index(x)]

    __call__ = evaluate

    def run_cost(self, x: float) -> tuple[float, bool]:
        """Cheapest per-unit fiber cost of a run at ``x`` or arbitrarily close to it.

        Returns ``(cost, attained)``; ``attained`` is False when the cost is only
        approached from an adjacent strip and never reached at ``x`` itself.
        """
        x = self._check(x)
        here = self.evaluate(x)
        best = min(here, self.strip_values[self.strip_index(x)])
        k = bisect_left(self.breakpoints, x)
        if 0 < k < len(self.breakpoints) and self.breakpoints[k] == x:
            # x is the open right end of strip k - 1
            best = min(best, self.strip_values[k - 1])
        return best, best == here

    def infimum_on_interval(self, a: float, b: float) -> float:
        """Pointwise infimum of the profile over ``[a, b]``."""
        a = self._check(a)
        b = self._check(b)
        if a > b:
            raise DomainError(f"empty interval [{a}, {b}]")
        if a == b:
            return self.evaluate(a)
        best = math.inf
        bps = self.breakpoints
        for i, v in enumerate(self.strip_values):
            lo, hi = bps[i], bps[i + 1]
            if lo > b or hi < a or (hi == a and i < len(self.strip_values) - 1):
                continue
            if lo == b and b in self._override_map:
                continue
            best = min(best, v)
        for key, v in self._override_map.items():
            if a <= key <= b:
                best = min(best, v)
        return best

    def supremum_on_set(self, Q) -> float:
        """Largest pointwise value over the points of ``Q`` (a DenseSubset or sequence)."""
        points = Q.points if isinstance(Q, DenseSubset) else tuple(Q)
        if not points:
            raise UsageError("empty point set")
        return max(self.evaluate(x) for x in points)

    def global_bounds(self) -> tuple[float, float]:
        vals = list(self.strip_values) + list(self._override_map.values())
        return min(vals), max(vals)

    def pieces(self, a: float, b: float) -> list[tuple[float, float]]:
        """``(width, value)`` for each strip crossed going from ``a`` to ``b``.

        Ordered in the direction of travel; zero-width crossings are dropped.
        """
        a = self._check(a)
        b = self._check(b)
        if a == b:
            return []
        lo, hi = min(a, b), max(a, b)
        bps = self.breakpoints
        out = []
        i = self.strip_index(lo)
        while i < len(self.strip_values) and bps[i] < hi:
            w = min(hi, bps[i + 1]) - max(lo, bps[i])
            if w > 0:
                out.append((w, self.strip_values[i]))
            i += 1
        if a > b:
            out.reverse()
        return out

    def first_violation(self, other: "WarpProfile") -> float | None:
        """An abscissa where ``self < other`` pointwise, or None if ``self >= other``."""
        if (self.t0, self.t1) != (other.t0, other.t1):
            raise UsageError("profiles live on different intervals")
        cuts = sorted(set(self.breakpoints) | set(other.breakpoints))
        for lo, hi in zip(cuts, cuts[1:]):
            mid = 0.5 * (lo + hi)
            if self.strip_values[self.strip_index(mid)] < other.strip_values[other.strip_index(mid)]:
                return mid
        for x in sorted(set(cuts) | set(self._override_map) | set(other._override_map)):
            if self.evaluate(x) < other.evaluate(x):
                return x
        return None

    def to_text(self) -> str:
        lines = []
        if self.label:
            lines.append(f"label = {self.label}")
        lines.append("breakpoints = " + ",".join(repr(b) for b in self.breakpoints))
        lines.append("values = " + ",".join(repr(v) for v in self.strip_values))
        for key, v in self.point_overrides:
            lines.append(f"override {key!r} = {v!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "WarpProfile":
        """Parse the line-oriented profile literal format.

        Example::

            breakpoints = 0,0.2,0.4,1
            values = 1,0.2,1
            override 0 = 0.25
        """
        bps = vals = None
        ovs = {}
        label = ""
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            try:
                if key == "breakpoints":
                    bps = [float(s) for s in value.split(",")]
                elif key == "values":
                    vals = [float(s) for s in value.split(",")]
                elif key.startswith("override"):
                    parts = key.split()
                    if len(parts) != 2:
                        raise UsageError(f"line {lineno}: expected 'override <x> = <value>'")
                    ovs[float(parts[1])] = float(value)
                elif key == "label":
                    label = value
                else:
                    raise UsageError(f"line {lineno}: unknown key {key!r}")
            except ValueError as exc:
                if isinstance(exc, UsageError):
                    raise
                raise UsageError(f"line {lineno}: bad number in {raw!r}") from exc
        if bps is None or vals is None:
            raise UsageError("profile needs both 'breakpoints' and 'values'")
        return cls(tuple(bps), tuple(vals), tuple(ovs.items()), label)


def _assemble(pieces: Sequence[tuple[float, float, float]], overrides: Mapping[float, float], label: str,
              t0: float = 0.0, t1: float = 1.0) -> WarpProfile:
    """Clip ``(start, end, value)`` pieces to ``[t0, t1]`` and drop redundant overrides."""
    bps = [t0]
    vals = []
    for start, end, v in pieces:
        start, end = max(start, t0), min(end, t1)
        if end <= start:
            continue
        bps.append(end)
        vals.append(v)
    base = WarpProfile(tuple(bps), tuple(vals), label=label)
    kept = {}
    for key, v in overrides.items():
        if t0 <= key <= t1 and base.evaluate(key) != v:
            kept[key] = v
    return WarpProfile(tuple(bps), tuple(vals), tuple(kept.items()), label)


def family_member(family: str, n: int = 1, alpha: float = 1.0) -> WarpProfile:
    """The ``n``-th member of one of the example families on ``[0, 1]``.

    ``alpha`` is the blow-up exponent of ``k_n``, ``w_n`` and ``v_n``; the other
    families ignore it.
    """
    if family not in FAMILIES:
        raise UsageError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if int(n) != n or n < 1:
        raise UsageError(f"n must be a positive integer, got {n}")
    n = int(n)
    alpha = _positive(alpha, "alpha")
    inv = 1.0 / n
    big = float(n) ** alpha
    label = family if family == "constant" else f"{family}(n={n}" + (f",alpha={alpha:g})" if family in ("k_n", "w_n", "v_n") else ")")
    if family == "constant":
        return _assemble([(0.0, 1.0, 1.0)], {}, label)
    if family == "s_n":
        return _assemble([(0.0, inv, inv), (inv, 1.0, 1.0)], {inv: inv}, label)
    if family == "h_n":
        return _assemble([(0.0, inv, 1.0), (inv, 2.0 * inv, inv), (2.0 * inv, 1.0, 1.0)], {2.0 * inv: inv}, label)
    if family == "z_n":
        return _assemble([(0.0, 1.0, 1.0)], {0.0: inv}, label)
    if family == "k_n":
        return _assemble([(0.0, inv, big), (inv, 1.0, 1.0)], {}, label)
    if family == "w_n":
        return _assemble([(0.0, 1.0, 1.0)], {0.0: big}, label)
    return _assemble([(0.0, 0.5, big), (0.5, 1.0, 1.0)], {}, label)


@dataclass(frozen=True)
class DenseSubset:
    """A finite stand-in for a dense family member, with its claimed covering radius."""

    points: tuple[float, ...]
    claimed_radius: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(sorted(float(p) for p in self.points)))
        if self.claimed_radius < 0:
            raise UsageError("claimed_radius must be nonnegative")

    def holds_on(self, t0: float, t1: float, slack: float = 1e-12) -> bool:
        return covering_radius(self.points, t0, t1) <= self.claimed_radius + slack


def covering_radius(Q: Iterable[float], t0: float, t1: float) -> float:
    """Largest distance from a point of ``[t0, t1]`` to the nearest member of ``Q``."""
    pts = sorted(float(q) for q in Q)
    if not pts:
        raise UsageError("covering radius of an empty set")
    if pts[0] < t0 or pts[-1] > t1:
        raise DomainError(f"points must lie in [{t0}, {t1}]")
    r = max(pts[0] - t0, t1 - pts[-1])
    for a, b in zip(pts, pts[1:]):
        r = max(r, 0.5 * (b - a))
    return r


def euclidean_sample(profile: WarpProfile, step: float) -> DenseSubset:
    """Abscissae on a ``step`` lattice where the profile equals 1, with their covering radius."""
    if step <= 0:
        raise UsageError("step must be positive")
    count = int(math.floor((profile.t1 - profile.t0) / step + 1e-9))
    xs = [profile.t0 + k * step for k in range(count + 1)]
    if xs[-1] < profile.t1:
        xs.append(profile.t1)
    pts = [x for x in xs if profile.evaluate(x) == 1.0]
    if not pts:
        raise UsageError(f"{profile.label or 'profile'} takes the value 1 nowhere on the sample lattice")
    return DenseSubset(tuple(pts), covering_radius(pts, profile.t0, profile.t1))

"""Sample-based verification: sup distances, Lipschitz envelopes, moduli and convergence reports.

Statements quantified over all pairs of points are discretized by a
``PairSampler``.  A sampled maximum is a lower bound on the true supremum, so
upper bounds are checked as one-sided inequalities with explicit solver error
budgets.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .base import SQRT2, UNIT_SQUARE, ProductSpec, SpacePoint, product_distance_array
from .engine import DEFAULT_TOL, distance_candidates, metric_handle_from_profile
from .errors import UsageError, WarpMetricError
from .oracles import MetricHandle, oracle_lookup
from .warping import FAMILIES, WarpProfile, covering_radius, family_member

log = logging.getLogger("warpmetric")

__all__ = [
    "PairSampler", "sup_difference", "lipschitz_envelope", "almost_lipschitz_offset",
    "equicontinuity_modulus", "covering_radius", "monotonicity_check", "MonotonicityReport",
    "convergence_report", "ConvergenceReport", "ConvergenceRecord", "REGISTRY", "lipschitz_counterexample",
    "fit_decay_exponent",
]

Pair = tuple[SpacePoint, SpacePoint]


@dataclass(frozen=True)
class PairSampler:
    """Deterministic source of point pairs.

    * ``grid``: every ordered pair of points of a ``resolution x resolution``
      lattice (``count`` is ignored).
    * ``random``: ``count`` uniform pairs drawn with ``seed``.
    * ``adversarial``: structured pairs at the weak points (domain boundary,
      special abscissae and their 1e-9 neighbours, pure-fiber pairs over many
      scales, identical pairs) followed by seeded random pairs up to ``count``.
    """

    mode: str = "random"
    count: int = 200
    resolution: int = 9
    seed: int = 0
    abscissae: tuple[float, ...] = ()
    spec: ProductSpec = UNIT_SQUARE
    include_equal: bool = False

    def __post_init__(self):
        if self.mode not in ("grid", "random", "adversarial"):
            raise UsageError(f"unknown sampler mode {self.mode!r}")
        if self.count < 0 or self.resolution < 2:
            raise UsageError("count must be nonnegative and resolution at least 2")
        object.__setattr__(self, "abscissae", tuple(float(a) for a in self.abscissae))

    @classmethod
    def for_profile(cls, profile: WarpProfile, count: int = 500, seed: int = 0,
                    spec: ProductSpec | None = None) -> "PairSampler":
        """Adversarial sampler aimed at the profile's breakpoints and overrides."""
        return cls("adversarial", count, seed=seed, abscissae=profile.special_abscissae,
                   spec=spec or ProductSpec(profile.t0, profile.t1))

    def _fibers(self, n: int, endpoint: bool = True) -> np.ndarray:
        L = self.spec.base.length
        if self.spec.base.periodic:
            return np.arange(n) * (L / n)
        return np.linspace(0.0, L, n) if endpoint else np.linspace(0.0, L, n + 2)[1:-1]

    def _random(self, rng: np.random.Generator, n: int) -> list[Pair]:
        sp = self.spec
        top = sp.base.length
        x = rng.uniform(sp.t0, sp.t1, size=(n, 2))
        y = rng.uniform(0.0, top, size=(n, 2))
        if sp.base.periodic:
            y = np.mod(y, top)
        return [(sp.point(x[i, 0], y[i, 0]), sp.point(x[i, 1], y[i, 1])) for i in range(n)]

    def _structured(self) -> list[Pair]:
        sp = self.spec
        t0, t1, L = sp.t0, sp.t1, sp.base.length
        xs = {t0, t1, 0.5 * (t0 + t1)}
        for a in self.abscissae:
            for x in (a - 1e-9, a, a + 1e-9):
                if t0 <= x <= t1:
                    xs.add(x)
        xs = sorted(xs)
        ys = [0.0, 0.25 * L, 0.5 * L, 0.75 * L] + ([] if sp.base.periodic else [L])
        out: list[Pair] = []
        # boundary pairs
        for ya in (0.0, 0.5 * L):
            for yb in ys:
                out.append((sp.point(t0, ya), sp.point(t1, yb)))
                out.append((sp.point(t0, ya), sp.point(t0, yb)))
                out.append((sp.point(t1, ya), sp.point(t1, yb)))
        # pure-fiber pairs across scales at every structural abscissa
        span = sp.base.diameter
        for x in xs:
            for k in range(-7, 1):
                d = span * 10.0 ** k
                start = 0.5 * (L - d) if not sp.base.periodic else 0.1 * L
                out.append((sp.point(x, start), sp.point(x, start + d)))
            out.append((sp.point(x, 0.0), sp.point(x, span)))
        # cross pairs between structural abscissae
        for i, xa in enumerate(xs):
            for xb in xs[i + 1:]:
                out.append((sp.point(xa, 0.2 * L), sp.point(xb, 0.7 * L)))
                out.append((sp.point(xa, 0.5 * L), sp.point(xb, 0.5 * L)))
        if self.include_equal:
            out.extend((sp.point(x, 0.3 * L), sp.point(x, 0.3 * L)) for x in xs)
        seen = set()
        uniq = []
        for pr in out:
            if pr not in seen:
                seen.add(pr)
                uniq.append(pr)
        return uniq

    def pairs(self) -> list[Pair]:
        sp = self.spec
        if self.mode == "grid":
            xs = np.linspace(sp.t0, sp.t1, self.resolution)
            ys = self._fibers(self.resolution)
            pts = [sp.point(x, y) for x in xs for y in ys]
            return [(a, b) for a in pts for b in pts if self.include_equal or a != b]
        rng = np.random.default_rng(self.seed)
        if self.mode == "random":
            return self._random(rng, self.count)
        out = self._structured()
        if not self.include_equal:
            out = [(a, b) for a, b in out if a != b]
        if len(out) < self.count:
            out.extend(self._random(rng, self.count - len(out)))
        return out

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """``(xp, yp, xq, yq)`` coordinate arrays; grid mode avoids building tuples."""
        if self.mode == "grid":
            sp = self.spec
            xs = np.linspace(sp.t0, sp.t1, self.resolution)
            ys = self._fibers(self.resolution)
            X, Y = np.meshgrid(xs, ys, indexing="ij")
            px, py = X.ravel(), Y.ravel()
            n = px.size
            ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
            ii, jj = ii.ravel(), jj.ravel()
            if not self.include_equal:
                keep = ii != jj
                ii, jj = ii[keep], jj[keep]
            return px[ii], py[ii], px[jj], py[jj]
        arr = np.array([(p.x, p.fiber, q.x, q.fiber) for p, q in self.pairs()], dtype=float).reshape(-1, 4)
        return arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]


def _values(m: MetricHandle, pairs: Sequence[Pair]) -> np.ndarray:
    return m.many(pairs)


def sup_difference(a: MetricHandle, b: MetricHandle, s: PairSampler) -> tuple[float, Pair]:
    """Largest sampled ``|a - b|`` and the pair attaining it."""
    pairs = s.pairs()
    if not pairs:
        raise UsageError("sampler produced no pairs")
    diff = np.abs(_values(a, pairs) - _values(b, pairs))
    k = int(np.argmax(diff))
    return float(diff[k]), pairs[k]


class Envelope(NamedTuple):
    c_est: float
    C_est: float


def lipschitz_envelope(m: MetricHandle, s: PairSampler) -> Envelope:
    """Smallest and largest sampled ratio ``m(p, q) / d(p, q)``; ``p == q`` pairs are skipped."""
    pairs = [(p, q) for p, q in s.pairs() if p != q]
    skipped = len(s.pairs()) - len(pairs) if s.include_equal else 0
    if skipped:
        log.info("lipschitz_envelope skipped %d identical pairs", skipped)
    if not pairs:
        raise UsageError("sampler produced no pairs of distinct points")
    arr = np.array([(p.x, p.fiber, q.x, q.fiber) for p, q in pairs])
    d = product_distance_array(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], m.spec)
    ratio = _values(m, pairs) / d
    return Envelope(float(ratio.min()), float(ratio.max()))


def almost_lipschitz_offset(m: MetricHandle, C: float, s: PairSampler) -> float:
    """Smallest additive slack making ``m <= sqrt(2) * C * d + slack`` on the sample."""
    if not C >= 1:
        raise UsageError(f"C must be at least 1, got {C}")
    pairs = s.pairs()
    if not pairs:
        return 0.0
    arr = np.array([(p.x, p.fiber, q.x, q.fiber) for p, q in pairs])
    d = product_distance_array(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], m.spec)
    return float(max(0.0, np.max(_values(m, pairs) - SQRT2 * C * d)))


_DIRECTIONS = ((1.0, 0.0), (0.0, 1.0), (math.sqrt(0.5), math.sqrt(0.5)), (math.sqrt(0.5), -math.sqrt(0.5)))


def _shift(spec: ProductSpec, p: SpacePoint, dx: float, dy: float) -> SpacePoint:
    x = min(max(p.x + dx, spec.t0), spec.t1)
    y = p.fiber + dy
    y = spec.base.normalize(y) if spec.base.periodic else min(max(y, 0.0), spec.base.length)
    return SpacePoint(x, y)


def _perturbations(spec: ProductSpec, p: SpacePoint, q: SpacePoint, r: float):
    """Pairs within product distance ``r`` of ``(p, q)``: one end moved, or both moved apart or together."""
    h = r / SQRT2
    for ux, uy in _DIRECTIONS:
        for sgn in (1.0, -1.0):
            ax, ay = sgn * ux, sgn * uy
            yield _shift(spec, p, ax * r, ay * r), q
            yield p, _shift(spec, q, ax * r, ay * r)
            yield _shift(spec, p, -ax * h, -ay * h), _shift(spec, q, ax * h, ay * h)
            yield _shift(spec, p, ax * h, ay * h), _shift(spec, q, ax * h, ay * h)


def equicontinuity_modulus(m: MetricHandle, deltas: Sequence[float], s: PairSampler) -> dict[float, float]:
    """Sampled modulus ``delta -> max |m(p, q) - m(p', q')|`` over nearby pairs of pairs.

    Nearby means product distance ``sqrt(d(p, p')**2 + d(q, q')**2) < delta``.
    Each sampled pair and each diagonal pair ``(p, p)`` is compared with
    deterministic perturbations at 0.999 * delta.
    """
    deltas = [float(d) for d in deltas]
    if any(d <= 0 for d in deltas) or any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise UsageError("deltas must be positive and increasing")
    spec = m.spec
    base = s.pairs()
    base = base + [(p, p) for p, _ in base]
    table = {}
    for delta in deltas:
        r = 0.999 * delta
        left, right = [], []
        for p, q in base:
            for p2, q2 in _perturbations(spec, p, q, r):
                left.append((p, q))
                right.append((p2, q2))
        diff = np.abs(_values(m, left) - _values(m, right))
        table[delta] = float(diff.max()) if diff.size else 0.0
    return table


@dataclass(frozen=True)
class MonotonicityReport:
    worst_margin: float
    witness: Pair | None
    passed: bool
    tol: float


def monotonicity_check(f: WarpProfile, g: WarpProfile, s: PairSampler, tol: float = DEFAULT_TOL) -> MonotonicityReport:
    """Check ``d_f >= d_g - 2 tol`` on the sample for profiles with ``f >= g``."""
    bad = f.first_violation(g)
    if bad is not None:
        raise UsageError(f"f < g at x = {bad}: f = {f.evaluate(bad)}, g = {g.evaluate(bad)}")
    worst, witness = math.inf, None
    for p, q in s.pairs():
        margin = distance_candidates(f, p, q, tol).value - distance_candidates(g, p, q, tol).value
        if margin < worst:
            worst, witness = margin, (p, q)
    if witness is None:
        worst = 0.0
    return MonotonicityReport(worst, witness, worst >= -2 * tol, tol)


def lipschitz_counterexample(n: int, alpha: float, y1: float = 0.0, tol: float = DEFAULT_TOL) -> tuple[Pair, float]:
    """Pair on the blow-up edge of ``k_n`` whose distance ratio to Euclidean is ``n**alpha``.

    The fiber gap ``2 / (n**(alpha+1) * (n**alpha - 1))`` is small enough that
    climbing straight up inside the blow-up strip beats leaving it.
    """
    if int(n) != n or n < 2:
        raise UsageError(f"n must be an integer >= 2, got {n}")
    if not alpha > 0:
        raise UsageError(f"alpha must be positive, got {alpha}")
    big = float(n) ** alpha
    if big - 1.0 <= 1e-12:
        raise UsageError(f"n**alpha = {big} is too close to 1")
    gap = 2.0 / (n ** (alpha + 1) * (big - 1.0))
    if y1 < 0 or y1 + gap > 1:
        raise UsageError("the pair does not fit in the unit fiber")
    p, q = SpacePoint(0.0, y1), SpacePoint(0.0, y1 + gap)
    value = distance_candidates(family_member("k_n", n, alpha), p, q, tol).value
    return (p, q), value / gap


# ----------------------------------------------------------- convergence

def _bound_quotient(n: int, alpha: float) -> float:
    return 4.0 / n


def _bound_euclid(n: int, alpha: float) -> float:
    return 2.0 / n


# family -> (limit oracle, per-n bound on sup_diff or None for one-sided checks)
REGISTRY = {
    "constant": ("euclid", lambda n, alpha: 0.0),
    "s_n": ("quotient", _bound_quotient),
    "h_n": ("quotient", _bound_quotient),
    "z_n": ("quotient", _bound_quotient),
    "k_n": ("euclid", _bound_euclid),
    "w_n": ("euclid", _bound_euclid),
    "v_n": ("blowup", None),
}


@dataclass
class ConvergenceRecord:
    n: int
    sup_diff: float
    witness: list
    c_est: float
    C_est: float
    offset: float
    budget: float
    bound: float | None
    passed: bool
    error: str | None = None


def fit_decay_exponent(ns: Sequence[float], values: Sequence[float]) -> float | str:
    """Least-squares slope of ``log(value)`` against ``log(n)``; needs three positive points."""
    pts = [(n, v) for n, v in zip(ns, values) if v is not None and v > 0 and math.isfinite(v)]
    if len(pts) < 3:
        return "insufficient data"
    x = np.log([n for n, _ in pts])
    y = np.log([v for _, v in pts])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


@dataclass
class ConvergenceReport:
    family: str
    alpha: float
    limit: str
    records: list[ConvergenceRecord] = field(default_factory=list)
    fitted_exponent: float | str = "insufficient data"
    decreasing: bool = True

    @property
    def passed(self) -> bool:
        return bool(self.records) and all(r.passed for r in self.records) and self.decreasing

    def to_dict(self) -> dict:
        recs = []
        for r in self.records:
            d = asdict(r)
            d["pass"] = d.pop("passed")
            recs.append(d)
        return {"family": self.family, "alpha": self.alpha, "limit": self.limit, "records": recs,
                "fitted_exponent": self.fitted_exponent, "decreasing": self.decreasing, "pass": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    CSV_COLUMNS = ("family", "alpha", "n", "sup_diff", "witness", "c_est", "C_est", "offset", "budget", "pass",
                   "fitted_exponent")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for r in self.records:
            wit = " ".join(repr(float(c)) for pt in r.witness for c in pt) if r.witness else ""
            w.writerow([self.family, repr(self.alpha), r.n, repr(r.sup_diff), wit, repr(r.c_est), repr(r.C_est),
                        repr(r.offset), repr(r.budget), str(r.passed).lower(), self.fitted_exponent])
        return buf.getvalue()


def convergence_report(family: str, n_list: Iterable[int], alpha: float = 1.0, limit: MetricHandle | str | None = None,
                       s: PairSampler | None = None, solver: str = "candidate", tol: float = DEFAULT_TOL,
                       h: float = 1 / 256, C: float = 1.0) -> ConvergenceReport:
    """Per-n distance to the family's limit metric, envelopes and a decay fit.

    Per-n verdicts compare ``sup_diff`` with the registry bound plus the
    solver budget.  Families without a rate (``v_n``) are checked one-sidedly
    (``d_n <= limit + budget``, as the profiles increase to the limit) and the
    report additionally requires ``sup_diff`` to decrease along ``n_list``.
    """
    if family not in REGISTRY:
        raise UsageError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    default_limit, bound_fn = REGISTRY[family]
    if limit is None:
        limit = default_limit
    if isinstance(limit, str):
        limit = oracle_lookup(limit)
    report = ConvergenceReport(family, float(alpha), limit.name)
    sups = []
    for n in n_list:
        profile = family_member(family, n, alpha)
        sampler = s if s is not None else PairSampler.for_profile(profile)
        try:
            m = metric_handle_from_profile(profile, solver, tol=tol, h=h)
            m = replace(m, evaluator=lru_cache(maxsize=None)(m.evaluator))
            pairs = sampler.pairs()
            mine = m.many(pairs)
            ref = limit.many(pairs)
            diff = np.abs(mine - ref)
            k = int(np.argmax(diff))
            sup, wit = float(diff[k]), pairs[k]
            env = lipschitz_envelope(m, sampler)
            off = almost_lipschitz_offset(m, C, sampler)
            budget = m.budget + limit.budget
            bound = None if bound_fn is None else bound_fn(n, alpha)
            if bound is None:
                ok = float(np.max(mine - ref)) <= budget
            else:
                ok = sup <= bound + budget
            rec = ConvergenceRecord(int(n), sup, [list(wit[0]), list(wit[1])], env.c_est, env.C_est, off, budget,
                                    bound, bool(ok))
        except WarpMetricError as exc:
            rec = ConvergenceRecord(int(n), math.nan, [], math.nan, math.nan, math.nan, math.nan, None, False, str(exc))
        report.records.append(rec)
        sups.append(rec.sup_diff)
    report.fitted_exponent = fit_decay_exponent([r.n for r in report.records], sups)
    budgets = [r.budget for r in report.records]
    report.decreasing = all(b <= a + max(ba, bb) for a, b, ba, bb in zip(sups, sups[1:], budgets, budgets[1:])) \
        and not any(math.isnan(v) for v in sups)
    return report

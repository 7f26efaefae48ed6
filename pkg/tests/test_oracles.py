import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from warpmetric.base import product_distance
from warpmetric.errors import DomainError, UsageError
from warpmetric.oracles import ORACLE_NAMES, MetricHandle, oracle_blowup, oracle_lookup, oracle_quotient

from conftest import points


def test_quotient_examples():
    assert oracle_quotient((0.3, 0.1), (0.4, 0.9)) == pytest.approx(0.7)
    assert oracle_quotient((0, 0.2), (0, 0.9)) == 0.0
    assert oracle_quotient((0.3, 0.5), (0.4, 0.5)) == pytest.approx(0.1)


def test_blowup_examples():
    assert oracle_blowup((0.2, 0.3), (0.4, 0.7)) == pytest.approx(0.8)
    assert oracle_blowup((0.2, 0.3), (0.1, 0.3)) == pytest.approx(0.1)
    assert oracle_blowup((0.6, 0.2), (0.9, 0.6)) == pytest.approx(0.5)
    # one point on each side: walk to the line x = 1/2, then straight
    assert oracle_blowup((0.1, 0.0), (0.9, 0.3)) == pytest.approx(0.4 + 0.5)
    assert oracle_blowup((0.9, 0.3), (0.1, 0.0)) == pytest.approx(0.4 + 0.5)


def test_lookup_examples():
    assert oracle_lookup("euclid")((0, 0), (0.6, 0.8)) == pytest.approx(1.0)
    assert oracle_lookup("quotient")((0, 0.2), (0, 0.9)) == 0.0
    assert oracle_lookup("blowup")((0.25, 0.25), (0.25, 0.25)) == 0.0
    assert oracle_lookup("taxi")((0, 0), (0.6, 0.8)) == pytest.approx(1.4)
    assert set(ORACLE_NAMES) == {"euclid", "taxi", "quotient", "blowup"}
    with pytest.raises(UsageError):
        oracle_lookup("hyperbolic")


def test_oracles_reject_out_of_domain_points():
    with pytest.raises(DomainError):
        oracle_quotient((1.2, 0), (0, 0))
    with pytest.raises(DomainError):
        oracle_blowup((0.5, -0.5), (0, 0))


def test_handle_validation():
    with pytest.raises(UsageError):
        MetricHandle(oracle_quotient, "q", "approximate")
    with pytest.raises(UsageError):
        MetricHandle(oracle_quotient, "q", "solver_backed", -1.0)
    h = oracle_lookup("quotient")
    assert h.pair_bound((0.1, 0.1), (0.2, 0.2)) == (pytest.approx(math.hypot(0.1, 0.1)), 0.0)
    assert h.many([]).shape == (0,)


@pytest.mark.parametrize("name", ORACLE_NAMES)
def test_batch_matches_scalar(name, rng):
    h = oracle_lookup(name)
    pts = rng.uniform(0, 1, (400, 4))
    # exercise the special cases: collapsed line, shared fiber, both sides of x = 1/2
    pts[:40, 0] = 0.0
    pts[:40, 2] = 0.0
    pts[40:80, 3] = pts[40:80, 1]
    pts[80:120, [0, 2]] = rng.uniform(0, 0.5, (40, 2))
    pairs = [((a, b), (c, d)) for a, b, c, d in pts]
    scalar = np.array([h(p, q) for p, q in pairs])
    plain = MetricHandle(h.evaluator, name)
    np.testing.assert_allclose(h.many(pairs), scalar, rtol=0, atol=1e-15)
    np.testing.assert_allclose(plain.many(pairs), scalar, rtol=0, atol=0)


@given(points, points)
def test_quotient_vanishes_exactly_on_the_collapsed_set(p, q):
    v = oracle_quotient(p, q)
    collapsed = (p[0] == 0 and q[0] == 0) or p == q
    assert (v == 0.0) == collapsed


@given(points, points, points)
@pytest.mark.parametrize("name", ["quotient", "blowup"])
def test_oracle_axioms(name, p, q, r):
    d = oracle_lookup(name)
    assert d(p, q) == d(q, p)
    assert d(p, q) >= 0
    assert d(p, r) <= d(p, q) + d(q, r) + 1e-12


@given(st.tuples(st.floats(0.5, 1), st.floats(0, 1)), st.tuples(st.floats(0.5, 1), st.floats(0, 1)))
def test_blowup_is_euclidean_on_the_right_half(p, q):
    assert oracle_blowup(p, q) == product_distance(p, q)


@given(points, points)
def test_quotient_below_euclid_and_blowup_above(p, q):
    d = product_distance(p, q)
    assert oracle_quotient(p, q) <= d
    assert oracle_blowup(p, q) >= d - 1e-12


def test_blowup_ball_is_not_open_in_the_product_topology(rng):
    center = (0.25, 0.25)
    pts = rng.uniform(0, 1, (20000, 2))
    # dense sampling near the center as well
    near = center + rng.uniform(-0.125, 0.125, (20000, 2))
    level = np.column_stack([rng.uniform(0, 1, 500), np.full(500, 0.25)])
    pts = np.vstack([pts, near, level])
    inside = [tuple(pt) for pt in pts if oracle_blowup(center, tuple(pt)) < 0.125]
    assert len(inside) > 100
    assert all(pt[1] == 0.25 for pt in inside)
    # the horizontal segment itself is inside
    assert oracle_blowup(center, (0.3, 0.25)) == pytest.approx(0.05)
    # but arbitrarily small vertical moves are far away
    assert oracle_blowup(center, (0.25, 0.25 + 1e-12)) > 0.5

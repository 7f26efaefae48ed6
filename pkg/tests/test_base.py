import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from warpmetric.base import (SQRT2, BaseSpec, CurvePolyline, ProductSpec, SpacePoint, base_distance,
                             generalized_line, product_distance, product_distance_array, taxi_distance,
                             taxi_distance_array)
from warpmetric.errors import DomainError, UsageError

from conftest import points

CIRCLE = BaseSpec("circle", 1.0)


def test_product_distance_examples():
    assert product_distance((0, 0), (0.6, 0.8)) == pytest.approx(1.0, abs=1e-15)
    assert taxi_distance((0, 0), (0.6, 0.8)) == pytest.approx(1.4, abs=1e-15)
    assert product_distance((0.3, 0.3), (0.3, 0.3)) == 0.0


def test_circle_uses_shorter_arc():
    spec = ProductSpec(base=CIRCLE)
    assert product_distance((0, 0.1), (0, 0.9), spec) == pytest.approx(0.2)
    assert base_distance(0.05, 0.95, CIRCLE) == pytest.approx(0.1)
    assert CIRCLE.signed_delta(0.9, 0.1) == pytest.approx(0.2)
    assert CIRCLE.signed_delta(0.1, 0.9) == pytest.approx(-0.2)


def test_circle_antipodal_tie_goes_up():
    assert CIRCLE.signed_delta(0.25, 0.75) == pytest.approx(0.5)
    assert CIRCLE.signed_delta(0.75, 0.25) == pytest.approx(0.5)


def test_normalize():
    assert CIRCLE.normalize(1.25) == pytest.approx(0.25)
    assert CIRCLE.normalize(-0.25) == pytest.approx(0.75)
    assert 0.0 <= CIRCLE.normalize(-1e-18) < 1.0
    with pytest.raises(DomainError):
        BaseSpec().normalize(1.5)
    with pytest.raises(DomainError):
        BaseSpec().normalize(math.nan)


def test_domain_checks():
    with pytest.raises(DomainError):
        product_distance((1.5, 0), (0, 0))
    with pytest.raises(UsageError):
        BaseSpec("torus")
    with pytest.raises(UsageError):
        ProductSpec(1.0, 0.0)
    with pytest.raises(UsageError):
        BaseSpec("interval", 0.0)


def test_generalized_line():
    line = generalized_line((0.1, 0.2), (0.5, 0.9))
    assert line.start == SpacePoint(0.1, 0.2) and line.end == SpacePoint(0.5, 0.9)
    assert len(generalized_line((0.1, 0.2), (0.1, 0.2))) == 1
    assert line.euclidean_length() == pytest.approx(math.hypot(0.4, 0.7))
    spec = ProductSpec(base=CIRCLE)
    assert generalized_line((0, 0.9), (0, 0.1), spec).euclidean_length(spec) == pytest.approx(0.2)


def test_polyline_needs_a_vertex():
    with pytest.raises(UsageError):
        CurvePolyline(())


@given(points, points)
def test_taxi_sandwich(p, q):
    d = product_distance(p, q)
    t = taxi_distance(p, q)
    assert d <= t + 1e-12
    assert t <= SQRT2 * d + 1e-12


@given(points, points, points)
def test_product_metric_axioms(p, q, r):
    assert product_distance(p, q) == product_distance(q, p)
    assert product_distance(p, r) <= product_distance(p, q) + product_distance(q, r) + 1e-12


@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=20))
def test_vectorized_matches_scalar(rows):
    a = np.array(rows)
    for base in (BaseSpec(), CIRCLE):
        spec = ProductSpec(base=base)
        d = product_distance_array(a[:, 0], a[:, 1], a[:, 2], a[:, 3], spec)
        t = taxi_distance_array(a[:, 0], a[:, 1], a[:, 2], a[:, 3], spec)
        for i, (x1, y1, x2, y2) in enumerate(rows):
            assert d[i] == pytest.approx(product_distance((x1, y1), (x2, y2), spec), abs=1e-14)
            assert t[i] == pytest.approx(taxi_distance((x1, y1), (x2, y2), spec), abs=1e-14)

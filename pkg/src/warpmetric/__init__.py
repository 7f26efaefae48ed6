"""Distances, limit metrics and convergence checks for warped product length spaces."""
from .base import (BaseSpec, CurvePolyline, ProductSpec, SpacePoint, UNIT_SQUARE, base_distance, generalized_line,
                   product_distance, taxi_distance)
from .engine import (DistanceResult, distance_candidates, distance_grid, metric_handle_from_profile, polyline_length,
                     stencil_overhead)
from .errors import DomainError, ResourceError, UsageError, WarpMetricError
from .kernels import BACKEND
from .oracles import MetricHandle, oracle_blowup, oracle_lookup, oracle_quotient
from .warping import FAMILIES, DenseSubset, WarpProfile, covering_radius, euclidean_sample, family_member

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BaseSpec", "CurvePolyline", "DenseSubset", "DistanceResult", "DomainError", "FAMILIES",
    "MetricHandle", "ProductSpec", "ResourceError", "SpacePoint", "UNIT_SQUARE", "UsageError", "WarpMetricError",
    "WarpProfile", "base_distance", "covering_radius", "distance_candidates", "distance_grid", "euclidean_sample",
    "family_member", "generalized_line", "metric_handle_from_profile", "oracle_blowup", "oracle_lookup",
    "oracle_quotient", "polyline_length", "product_distance", "stencil_overhead", "taxi_distance",
]

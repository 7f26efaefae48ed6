import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from warpmetric import _pykernels, kernels
from warpmetric.engine import distance_grid
from warpmetric.warping import WarpProfile, family_member

try:
    from warpmetric import _ckernels
except ImportError:  # pragma: no cover - exercised only without a compiler
    _ckernels = None

needs_compiled = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")

pieces = st.lists(st.tuples(st.floats(0.001, 0.5), st.floats(0.25, 4.0)), min_size=1, max_size=6)


def _primal(widths, values, moves, run, cap):
    return sum(math.hypot(w, v * m) for w, v, m in zip(widths, values, moves)) + (cap * run if run else 0.0)


@given(pieces, st.floats(0.0, 1.0), st.floats(0.1, 5.0), st.lists(st.floats(0, 1), min_size=7, max_size=7))
def test_dual_value_is_a_lower_bound_and_attained(pcs, D, cap, split):
    widths = [w for w, _ in pcs]
    values = [v for _, v in pcs]
    value, p = _pykernels.dual_optimum(widths, values, D, cap)
    # any feasible split of D among the pieces and a run costs at least the dual value
    used = split[: len(widths)] + [split[-1]]
    if sum(used) == 0:
        used[-1] = 1.0
    total = sum(used)
    moves = [D * s / total for s in used[:-1]]
    run = D * used[-1] / total
    assert value <= _primal(widths, values, moves, run, cap) + 1e-12
    # and the optimal split recovered from the ray parameter attains it
    m = [w * p / (v * math.sqrt((v - p) * (v + p))) for w, v in zip(widths, values)]
    rest = D - sum(m)
    assert rest >= -1e-9 * max(1.0, D)
    attained = _primal(widths, values, m, max(rest, 0.0), cap if p >= cap else min(values))
    assert attained == pytest.approx(value, rel=1e-9, abs=1e-12)


def test_dual_simple_cases():
    # straight segment through a single strip
    v, _ = _pykernels.dual_optimum([0.6], [1.0], 0.8, math.inf)
    assert v == pytest.approx(1.0)
    # no width: everything on the run
    v, p = _pykernels.dual_optimum([], [], 0.5, 0.3)
    assert v == pytest.approx(0.15) and p == 0.3
    # zero fiber displacement
    v, _ = _pykernels.dual_optimum([0.2, 0.3], [1, 5], 0.0, math.inf)
    assert v == pytest.approx(0.5)
    with pytest.raises(ValueError):
        _pykernels.dual_optimum([], [], 0.5, math.inf)


@needs_compiled
@given(pieces, st.floats(0.0, 1.0), st.floats(0.1, 5.0))
def test_backends_agree_on_dual(pcs, D, cap):
    widths = [w for w, _ in pcs]
    values = [v for _, v in pcs]
    a = _pykernels.dual_optimum(widths, values, D, cap)
    b = _ckernels.dual_optimum(widths, values, D, cap)
    assert a[0] == pytest.approx(b[0], rel=1e-14, abs=1e-15)


@needs_compiled
@pytest.mark.parametrize("periodic", [False, True])
def test_backends_agree_on_grid(monkeypatch, periodic):
    from warpmetric.base import BaseSpec
    base = BaseSpec("circle" if periodic else "interval")
    rng = np.random.default_rng(3)
    profiles = [family_member("h_n", 5), family_member("k_n", 4, 2),
                WarpProfile((0, 0.3, 0.7, 1), (0.5, 3.0, 1.0), ((0.3, 0.25),))]
    for prof in profiles:
        p, q = tuple(rng.uniform(0, 1, 2)), tuple(rng.uniform(0, 1, 2))
        monkeypatch.setattr(kernels, "grid_dijkstra", _ckernels.grid_dijkstra)
        fast = distance_grid(prof, p, q, 1 / 32, base)
        monkeypatch.setattr(kernels, "grid_dijkstra", _pykernels.grid_dijkstra)
        slow = distance_grid(prof, p, q, 1 / 32, base)
        assert fast.value == pytest.approx(slow.value, rel=1e-13)
        assert fast.path == slow.path


def test_backend_selection_flag():
    assert kernels.BACKEND in ("compiled", "python")
    if _ckernels is not None:
        assert kernels.BACKEND == "compiled" or kernels.os.environ.get("WARPMETRIC_PURE")


def test_pure_flag_forces_fallback():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-c", "import warpmetric.kernels as k; print(k.BACKEND)"],
                         env={**__import__("os").environ, "WARPMETRIC_PURE": "1"}, capture_output=True, text=True)
    assert out.stdout.strip() == "python"

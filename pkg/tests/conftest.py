import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from warpmetric.warping import WarpProfile

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@st.composite
def strip_profiles(draw, max_strips=4, lo=0.25, hi=4.0, overrides=False):
    """Random strip profile on [0, 1] with log-uniform values."""
    k = draw(st.integers(1, max_strips))
    cuts = sorted(set(draw(st.lists(st.floats(0.02, 0.98), min_size=k - 1, max_size=k - 1))))
    bps = (0.0, *cuts, 1.0)
    logs = draw(st.lists(st.floats(np.log(lo), np.log(hi)), min_size=len(bps) - 1, max_size=len(bps) - 1))
    ovs = ()
    if overrides and draw(st.booleans()):
        key = draw(st.sampled_from(bps))
        ovs = ((key, float(np.exp(draw(st.floats(np.log(lo), np.log(hi)))))),)
    return WarpProfile(bps, tuple(float(np.exp(v)) for v in logs), ovs)


unit = st.floats(0.0, 1.0)
points = st.tuples(unit, unit)


def random_profile(rng: np.random.Generator, max_strips: int = 6, lo: float = 0.25, hi: float = 4.0) -> WarpProfile:
    ns = int(rng.integers(1, max_strips + 1))
    bps = np.sort(rng.uniform(0, 1, ns - 1))
    vals = np.exp(rng.uniform(np.log(lo), np.log(hi), ns))
    return WarpProfile(tuple([0.0, *map(float, bps), 1.0]), tuple(map(float, vals)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

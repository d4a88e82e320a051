import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from twrelay.channel import ChannelRealization, SumPower, SystemConfig

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# (criterion number, passed, detail) from the acceptance suite
ACCEPTANCE_RESULTS = []


def cn(rng, k, var=1.0):
    """K i.i.d. circularly symmetric complex Gaussians."""
    return np.sqrt(var / 2) * (rng.standard_normal(k) + 1j * rng.standard_normal(k))


def reciprocal_channel(rng, k):
    return ChannelRealization.from_forward(cn(rng, k), cn(rng, k))


def nonreciprocal_channel(rng, k):
    return ChannelRealization(cn(rng, k), cn(rng, k), cn(rng, k), cn(rng, k))


def unit_config(k, relay_constraint, p_s1=1.0, p_s2=1.0):
    return SystemConfig.unit_noise(p_s1, p_s2, k, relay_constraint)


def trivial_setup(relay_constraint=None):
    """K=1, unit channels, unit powers and noises."""
    ch = ChannelRealization.from_forward([1.0], [1.0])
    rc = relay_constraint if relay_constraint is not None else SumPower(3.0)
    return ch, unit_config(1, rc)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _quiet_solver():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

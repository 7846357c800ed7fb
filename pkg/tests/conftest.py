import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("stress", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

from shelltrap import RB87, AtomSpecies, TrapConfig  # noqa: E402


@pytest.fixture
def cfg45():
    """Spectroscopy operating point: 45 G/cm, 2.294336 MHz, 250 kHz."""
    return TrapConfig.from_lab(45.0, 2.294336e6, 250e3)


@pytest.fixture
def cfg50():
    """Rabi-oscillation operating point: 50 G/cm, 2.294336 MHz, 270 kHz."""
    return TrapConfig.from_lab(50.0, 2.294336e6, 270e3)


@pytest.fixture
def symmetric_species():
    """Hypothetical Rb-like atom with g_I = 0, so that g_1 = -g_2 exactly."""
    return AtomSpecies.from_hfs_frequency("sym", 1.5, 0.5, 2.0, 0.0, RB87.hfs_hz, RB87.mass)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])

import os

import pytest
from hypothesis import HealthCheck, settings

from chiral_switch import Chirality, find_switch
from chiral_switch.qmodel import BASELINE_DECOHERENCE, BASELINE_DRIVES

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def baseline_drives():
    return BASELINE_DRIVES


@pytest.fixture(scope="session")
def baseline_dec():
    return BASELINE_DECOHERENCE


@pytest.fixture(scope="session")
def switch_l():
    d = BASELINE_DRIVES
    return find_switch(d.omega31, d.omega32, d.delta, BASELINE_DECOHERENCE, silenced=Chirality.LEFT)


@pytest.fixture(scope="session")
def switch_r():
    d = BASELINE_DRIVES
    return find_switch(d.omega31, d.omega32, d.delta, BASELINE_DECOHERENCE, silenced=Chirality.RIGHT)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

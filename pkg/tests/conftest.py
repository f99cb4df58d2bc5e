import math

import pytest

from rabiwatch.measurement import ApparatusParams, measurement_amplitudes

FIG2 = dict(v_ratio=1.25, epsilon=0.068 * math.pi, phi0=math.pi, tau=0.002, N=25)
FIG4 = dict(v_ratio=20.0, epsilon=20.0 * math.pi, phi0=0.0, tau=0.002, N=25)


@pytest.fixture
def fig2_params():
    return ApparatusParams(**FIG2)


@pytest.fixture
def fig4_params():
    return ApparatusParams(**FIG4)


@pytest.fixture
def fig2_model(fig2_params):
    return measurement_amplitudes(fig2_params)


@pytest.fixture
def fig4_model(fig4_params):
    return measurement_amplitudes(fig4_params)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

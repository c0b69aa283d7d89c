import math

import pytest

from powerlevy import FmlsModel, TemperedModel

K = 4000.0
R = 0.01
SIGMA = 0.2


def atm_spot(tau: float = 2.0, u: float = 1.0) -> float:
    return K ** (1.0 / u) * math.exp(-R * tau)


@pytest.fixture
def stable17():
    return FmlsModel(1.7, SIGMA, R)


@pytest.fixture
def gauss():
    return FmlsModel(2.0, SIGMA, R)


@pytest.fixture
def tempered17():
    return TemperedModel.from_sigma(1.7, SIGMA, 0.5, R)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])

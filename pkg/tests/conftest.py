import pytest

from _acceptance_log import RESULTS
from stochheat.spectral import HeatModel


@pytest.fixture
def unit_model():
    return HeatModel(nu=1.0, horizon=1.0)


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

import pytest

from simquad.precision import PrecisionContext
from simquad.systems import BesselI, BesselK


@pytest.fixture(scope="session")
def ctx100():
    return PrecisionContext(100)


@pytest.fixture(scope="session")
def ctx40():
    return PrecisionContext(40)


@pytest.fixture(scope="session")
def besselk():
    return BesselK("1", "0")


@pytest.fixture(scope="session")
def besseli():
    return BesselI("0", "1")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])

import pytest

from wittkit.ring import EisensteinRing, PolyRing


@pytest.fixture(scope="session")
def R2():
    """Z_2[pi]/(pi^2 - 2) to precision 2^12."""
    return EisensteinRing(2, 2, 12)


@pytest.fixture(scope="session")
def O2():
    return PolyRing.O(2)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])

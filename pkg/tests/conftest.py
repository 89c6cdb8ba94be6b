import pytest

from peribeta import parse_base

ETA = "-1,-1,0,1"
PHI = "-1,-1,1"
THETA = "1,-3,1"
NONF = "-1,2,-3,1"


@pytest.fixture(scope="session")
def eta():
    return parse_base(ETA)


@pytest.fixture(scope="session")
def phi():
    return parse_base(PHI)


@pytest.fixture(scope="session")
def theta():
    return parse_base(THETA)


@pytest.fixture(scope="session")
def nonf():
    return parse_base(NONF)


_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record, print and assert one acceptance criterion."""
    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        _CRITERIA[number] = line
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])

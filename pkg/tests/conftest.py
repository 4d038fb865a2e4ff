import pytest

from nfvcache.scenario import Scenario
from nfvcache.topology import build_paper_topology, build_reduced_topology


@pytest.fixture(scope="session")
def full():
    return build_paper_topology()


@pytest.fixture(scope="session")
def reduced():
    return build_reduced_topology()


@pytest.fixture(scope="session")
def scenario():
    return Scenario()


# one verdict line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])

import pytest

from eensembles.bittransmission import build
from eensembles.dsl import bundled, parse


@pytest.fixture(scope="session")
def bt():
    return build()


@pytest.fixture(scope="session")
def spec():
    return parse(bundled())


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS, line

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(line(n))

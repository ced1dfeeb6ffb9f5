import pytest

from acdeduce.parse import parse_term
from acdeduce.presets import ag, ag_blind, pure_ac


@pytest.fixture(scope="session")
def AG():
    return ag()


@pytest.fixture(scope="session")
def AC():
    return pure_ac()


@pytest.fixture(scope="session")
def BLIND():
    return ag_blind()


@pytest.fixture
def P(AG):
    """Parse over the AG signature."""
    return lambda text, th=AG: parse_term(text, th.signature)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])

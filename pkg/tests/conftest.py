from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from superstab.potentials import PotentialFamily, PotentialTerm, paper_example_family

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# lines collected by test_acceptance, echoed once at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def paper_family():
    return paper_example_family()


@pytest.fixture(scope="session")
def p3_only():
    """A=B=1, m=12, n=6 at p=3 with a purely repulsive pair term."""
    return PotentialFamily(1, {2: PotentialTerm(2, 1, 0, 3, 2),
                               3: PotentialTerm(3, 1, 1, 12, 6)})


@pytest.fixture(scope="session")
def half():
    return Fraction(1, 2)

from fractions import Fraction

import pytest
from hypothesis import settings

from githeight.configuration import Configuration

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


def identity(n: int) -> Configuration:
    return Configuration.from_columns([tuple(int(i == j) for i in range(n + 1)) for j in range(n + 1)])


@pytest.fixture
def triple() -> Configuration:
    """e1, e2, e1 + e2 in P^1."""
    return Configuration.from_columns([(1, 0), (0, 1), (1, 1)])


@pytest.fixture
def four_p1() -> Configuration:
    """e1, e2, e1 + e2, e1 - e2 in P^1."""
    return Configuration.from_columns([(1, 0), (0, 1), (1, 1), (1, -1)])


HALF = Fraction(1, 2)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        RESULTS = mod.RESULTS
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

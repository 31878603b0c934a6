import numpy as np
import pytest

from quantropy.ensemble import HistorySpace


@pytest.fixture
def two_state():
    return HistorySpace.from_actions([0.0, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Print and record one PASS/FAIL line, then fail the test if needed."""
    def emit(criterion, ok, message):
        line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {message}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        assert ok, line
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

import numpy as np
import pytest

from hybridint.models import DiskParams, PendulumParams, build_disk, build_pendulum


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def disk():
    return build_disk(DiskParams(e=0.5))


@pytest.fixture
def pendulum():
    return build_pendulum(PendulumParams(e=1.0))


_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record and print one pass/fail line for an acceptance criterion, then assert it."""

    def record(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

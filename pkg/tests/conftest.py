import numpy as np
import pytest

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


@pytest.fixture
def record():
    """Collect one pass/fail line per acceptance criterion."""

    def _record(label, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
        _ACCEPTANCE.append(line)
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)

import numpy as np
import pytest

from mhscg.manifold import random_point

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def point(rng):
    def make(n, k):
        return random_point(n, k, rng)
    return make


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""
    def report(num, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title}"
        if detail:
            line += f" ({detail})"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line
    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)

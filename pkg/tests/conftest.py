import math

import pytest

from qmonitor.core import Oscillator, UnitSystem
from qmonitor.grid import Grid

PERIOD = 2 * math.pi


@pytest.fixture(scope="session")
def units():
    return UnitSystem()


@pytest.fixture(scope="session")
def harmonic():
    """Units with 2m = hbar = omega = 1."""
    return Oscillator(m=0.5, omega=1.0, lam=0.0)


@pytest.fixture(scope="session")
def quartic():
    return Oscillator(m=1.0, omega=1.0, lam=4.0)


@pytest.fixture(scope="session")
def grid40():
    return Grid.symmetric(40.0, 2048)


@pytest.fixture(scope="session")
def grid_small():
    return Grid.symmetric(20.0, 512)


@pytest.fixture(scope="session")
def quartic_fd(quartic):
    from qmonitor.spectral import eigenvalues_fd
    return eigenvalues_fd(quartic, 10)


@pytest.fixture(scope="session")
def quartic_wkb(quartic):
    from qmonitor.spectral import eigenvalues_wkb
    return eigenvalues_wkb(quartic, 10)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion; the line is printed and repeated in the summary."""
    def emit(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

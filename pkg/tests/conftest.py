import math

import pytest

from tailsitter.aero import AeroModel


class ConstantPolar:
    """Fixed coefficients regardless of angle of attack."""

    def __init__(self, cl, cd):
        self.cl, self.cd = cl, cd

    def coefficients(self, alpha):
        return self.cl, self.cd


class FixedForces:
    """Aero stand-in returning fixed lift and drag whenever the vehicle moves."""

    def __init__(self, L, D):
        self.L, self.D = L, D

    def forces(self, V, alpha):
        return self.L, self.D


@pytest.fixture
def no_aero():
    return AeroModel(1.225, 1.0, ConstantPolar(0.0, 0.0))


@pytest.fixture
def deg():
    return math.radians


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")

import numpy as np
import pytest

from archheight import SingularCurve, from_a_invariants

ELKIES = [1, -1, 1, 31368015812338065133318565292206590792820353345,
          302038802698566087335643188429543498624522041683874493555186062568159847]
CURVE_11A2 = [0, -1, 1, -7820, -263580]

ACCEPTANCE_LINES = []


def random_complex_curve(rng, radius=10.0):
    """Coefficients uniform in the complex disc; resampled while |disc| < 1e-6."""
    while True:
        r = radius * np.sqrt(rng.random(5))
        t = 2 * np.pi * rng.random(5)
        coeffs = [complex(z) for z in r * np.exp(1j * t)]
        try:
            c = from_a_invariants(coeffs)
        except SingularCurve:
            continue
        if abs(c.disc) >= 1e-6:
            return c


def random_real_curve(rng, bound=10.0):
    """Real coefficients uniform in [-bound, bound], taken exactly."""
    while True:
        coeffs = [float(v) for v in rng.uniform(-bound, bound, 5)]
        try:
            c = from_a_invariants(coeffs)
        except SingularCurve:
            continue
        if abs(c.disc) >= 1e-6:
            return c


def random_sphere_points(rng, n):
    """Complex pairs of sup norm 1."""
    side = rng.integers(0, 2, n).astype(bool)
    unit = np.exp(2j * np.pi * rng.random(n))
    other = np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    return np.where(side, unit, other), np.where(side, other, unit)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance():
    def record(number, name, passed, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name} {detail}".rstrip())
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)

import cmath
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from extbloch.invariants import manifold_invariants
from extbloch.shapes import Filling, solve_complete
from extbloch.tricomplex import bundled

settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

OMEGA = cmath.exp(1j * math.pi / 3)
V0 = 1.014941606409653625021202554  # volume of the regular ideal tetrahedron
PI2 = math.pi ** 2


def mod_dist(a: complex, b: complex = 0) -> float:
    """Distance in C / pi^2 Z, written independently of the library."""
    d = complex(a) - complex(b)
    re = d.real - PI2 * round(d.real / PI2)
    return max(abs(re), abs(d.imag))


@pytest.fixture(scope="session")
def m004():
    return bundled("m004")


@pytest.fixture(scope="session")
def m004_complete(m004):
    return solve_complete(m004)


@pytest.fixture(scope="session")
def filled_runs(m004):
    out = {}
    for a, b in ((5, 1), (1, 2), (6, 1)):
        out[(a, b)] = manifold_invariants(m004, {0: Filling(a, b)}, method="both")
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {text}")

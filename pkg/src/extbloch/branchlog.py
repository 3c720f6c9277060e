"""Branch-aware logarithms and dilogarithms.

All branch indices used elsewhere in the package are measured against
``principal_log``, whose imaginary part lies in (-pi, pi].

Points on the cuts of the split plane are handled with an optional ``side``
argument: ``side=+1`` evaluates the limit from the upper half-plane and
``side=-1`` from the lower one.  It is ignored for non-real arguments.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

PI = math.pi
PI2 = math.pi ** 2
DEFAULT_TOL = 1e-9


class BranchDomainError(ValueError):
    """Raised for arguments outside a function's domain."""


def principal_log(z: complex, side: Optional[int] = None) -> complex:
    """Logarithm with imaginary part in (-pi, pi].

    For negative real ``z`` the result is ``ln|z| + i*pi`` unless ``side=-1``
    asks for the limit from below.
    """
    z = complex(z)
    if z == 0:
        raise BranchDomainError("log of zero")
    if z.imag == 0.0 and z.real < 0:
        return complex(math.log(-z.real), -PI if side == -1 else PI)
    return cmath.log(z)


def _bernoulli_coefficients(count: int) -> list[float]:
    # B_n / (n+1)!, with B_1 = -1/2
    bern = [Fraction(1)]
    for m in range(1, count):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * bern[k]
        bern.append(-acc / (m + 1))
    return [float(b / math.factorial(n + 1)) for n, b in enumerate(bern)]


_BERN = _bernoulli_coefficients(44)


def _dilog_core(z: complex) -> complex:
    # valid for |z| <= 1 and Re z <= 1/2, where |log(1-z)| < 1.3
    u = -cmath.log(1 - z)
    u2 = u * u
    total = u + _BERN[1] * u2
    power = u2 * u
    for n in range(2, len(_BERN), 2):
        term = _BERN[n] * power
        total += term
        if abs(term) < 1e-18 * max(abs(total), 1e-300):
            break
        power *= u2
    return total


def _dilog_unit_disc(z: complex) -> complex:
    if z.real <= 0.5:
        return _dilog_core(z)
    # reflection: Li2(z) + Li2(1-z) = pi^2/6 - log z log(1-z)
    w = 1 - z
    if w == 0:
        return complex(PI2 / 6)
    return PI2 / 6 - cmath.log(z) * cmath.log(w) - _dilog_core(w)


def dilog(z: complex, side: Optional[int] = None) -> complex:
    """Principal branch of Li2(z) = -int_0^z log(1-t)/t dt.

    On the cut z > 1 the value is the limit from the half-plane named by
    ``side`` (default: from above).
    """
    z = complex(z)
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI2 / 6)
    if z.imag == 0.0 and z.real > 1:
        x = z.real
        inv = _dilog_unit_disc(complex(1 / x)).real
        re = -inv - PI2 / 6 - 0.5 * math.log(x) ** 2 + PI2 / 2
        # Li2(x + i0) = Re Li2(x) + i pi log x for x > 1
        sgn = -1.0 if side == -1 else 1.0
        return complex(re, sgn * PI * math.log(x))
    if abs(z) <= 1:
        return _dilog_unit_disc(z)
    # inversion: Li2(z) + Li2(1/z) = -pi^2/6 - log(-z)^2/2, z off [0, inf)
    lm = cmath.log(-z)
    return -_dilog_unit_disc(1 / z) - PI2 / 6 - 0.5 * lm * lm


def rogers(z: complex, side: Optional[int] = None) -> complex:
    """Rogers dilogarithm ½ log z log(1-z) + Li2(z), principal logs."""
    z = complex(z)
    if z == 0 or z == 1:
        raise BranchDomainError(f"rogers undefined at {z}")
    opposite = None if side is None else -side
    lz = principal_log(z, side)
    l1 = principal_log(1 - z, opposite)
    return 0.5 * lz * l1 + dilog(z, side)


def r_lift(z: complex, p: int, q: int, side: Optional[int] = None) -> complex:
    """R(z;p,q) for explicit arguments, without reducing mod pi^2."""
    z = complex(z)
    opposite = None if side is None else -side
    lz = principal_log(z, side)
    l1 = principal_log(1 - z, opposite)
    return rogers(z, side) + 0.5j * PI * (p * l1 + q * lz) - PI2 / 6


def r_value(param) -> complex:
    """R of an ``ExtParam``-like object (needs ``z``, ``p``, ``q``, ``side``)."""
    return r_lift(param.z, param.p, param.q, getattr(param, "side", None))


def bloch_wigner(z: complex) -> float:
    """D(z) = Im Li2(z) + arg(1-z) log|z|; vanishes on the real line."""
    z = complex(z)
    if z.imag == 0.0:
        return 0.0
    return dilog(z).imag + cmath.phase(1 - z) * math.log(abs(z))


def _reduce_real(x: float) -> float:
    r = math.fmod(x, PI2)
    if r < 0:
        r += PI2
    if r >= PI2:
        r -= PI2
    return r


@dataclass(frozen=True)
class ModPiSquared:
    """A complex number modulo pi^2 (only the real part is periodic)."""

    value: complex

    def __post_init__(self):
        v = complex(self.value)
        object.__setattr__(self, "value", complex(_reduce_real(v.real), v.imag))

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag

    def __add__(self, other):
        other = other.value if isinstance(other, ModPiSquared) else complex(other)
        return ModPiSquared(self.value + other)

    def __sub__(self, other):
        other = other.value if isinstance(other, ModPiSquared) else complex(other)
        return ModPiSquared(self.value - other)

    def __neg__(self):
        return ModPiSquared(-self.value)

    def distance(self, other) -> float:
        """Largest of the imaginary gap and the wrapped real gap."""
        other = other if isinstance(other, ModPiSquared) else ModPiSquared(other)
        d = abs(self.real - other.real)
        d = min(d, PI2 - d)
        return max(d, abs(self.imag - other.imag))

    def isclose(self, other, tol: float = DEFAULT_TOL) -> bool:
        return self.distance(other) < tol


def mod_pi2(c: complex) -> ModPiSquared:
    return ModPiSquared(complex(c))


def congruent(a, b, tol: float = DEFAULT_TOL) -> bool:
    """True when ``a`` and ``b`` agree modulo pi^2 within ``tol``."""
    return mod_pi2(a.value if isinstance(a, ModPiSquared) else a).isclose(b, tol)

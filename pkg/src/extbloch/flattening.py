"""Flattened ideal simplices.

A cover point ``(z; p, q)`` corresponds to the log-parameter triple

    w0 = log z + p*pi*i
    w1 = -log(1 - z) + q*pi*i
    w2 = log(1 - z) - log z - (p + q)*pi*i

with principal logarithms.  Opposite edges of a simplex carry the same
log-parameter: edges 01 and 23 carry w0, 03 and 12 carry w1, 02 and 13
carry w2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Union

from .branchlog import PI, principal_log

# tet-edge index -> vertex pair; used throughout the package
EDGES: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX = {e: i for i, e in enumerate(EDGES)}
# which component of the triple each tet-edge carries
EDGE_COMPONENT = (0, 2, 1, 1, 2, 0)


class InvalidParamError(ValueError):
    pass


class InvalidTripleError(ValueError):
    pass


class DegenerateSimplexError(ValueError):
    pass


class UnsupportedShapeError(ValueError):
    pass


def _is_cut_point(z: complex) -> bool:
    return z.imag == 0.0 and not (0.0 < z.real < 1.0)


@dataclass(frozen=True)
class ExtParam:
    """A point (z; p, q) of the cover of C minus {0, 1}."""

    z: complex
    p: int
    q: int
    side: Optional[int] = None

    def __post_init__(self):
        z = complex(self.z)
        object.__setattr__(self, "z", z)
        if z == 0 or z == 1:
            raise InvalidParamError(f"shape {z} is 0 or 1")
        if int(self.p) != self.p or int(self.q) != self.q:
            raise InvalidParamError("branch indices must be integers")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "q", int(self.q))
        if self.side not in (None, 1, -1):
            raise InvalidParamError("side must be +1, -1 or None")
        if _is_cut_point(z):
            if self.side is None:
                raise InvalidParamError(f"real shape {z} off (0,1) needs a side flag")
        elif self.side is not None:
            object.__setattr__(self, "side", None)

    def logs(self) -> tuple[complex, complex]:
        """Principal (log z, log(1-z)), honoring the side flag."""
        opposite = None if self.side is None else -self.side
        return principal_log(self.z, self.side), principal_log(1 - self.z, opposite)

    def conjugate(self) -> "ExtParam":
        side = None if self.side is None else -self.side
        return ExtParam(self.z.conjugate(), -self.p, -self.q, side)


@dataclass(frozen=True)
class FlatTriple:
    w0: complex
    w1: complex
    w2: complex

    def __iter__(self):
        return iter((self.w0, self.w1, self.w2))

    def __getitem__(self, k: int) -> complex:
        return (self.w0, self.w1, self.w2)[k]


def ell(param: ExtParam) -> FlatTriple:
    lz, l1 = param.logs()
    w0 = lz + param.p * PI * 1j
    w1 = -l1 + param.q * PI * 1j
    return FlatTriple(w0, w1, -(w0 + w1))


def from_triple(t: FlatTriple, tol: float = 1e-9) -> ExtParam:
    """Inverse of :func:`ell`.

    z is fixed by knowing both z and 1 - z up to sign.  Real shapes off
    (0, 1) are returned with ``side=+1``.
    """
    w0, w1, w2 = complex(t.w0), complex(t.w1), complex(t.w2)
    scale = 1 + abs(w0) + abs(w1) + abs(w2)
    if abs(w0 + w1 + w2) > tol * scale:
        raise InvalidTripleError("log-parameters do not sum to zero")
    a, b = cmath.exp(w0), cmath.exp(-w1)
    best = None
    for s0 in (1, -1):
        for s1 in (1, -1):
            err = abs(s0 * a + s1 * b - 1)
            if best is None or err < best[0]:
                best = (err, s0 * a)
    err, z = best
    if err > tol * max(1.0, abs(a), abs(b)) or abs(z) < tol or abs(1 - z) < tol:
        raise InvalidTripleError("no shape matches this triple")
    if abs(z.imag) <= tol * max(1.0, abs(z)):
        z = complex(z.real, 0.0)
    side = 1 if _is_cut_point(z) else None
    probe = ExtParam(z, 0, 0, side)
    lz, l1 = probe.logs()
    p_real = (w0 - lz) / (PI * 1j)
    q_real = (w1 + l1) / (PI * 1j)
    p, q = round(p_real.real), round(q_real.real)
    if abs(p_real - p) > 1e-6 or abs(q_real - q) > 1e-6:
        raise InvalidTripleError("branch indices are not integral")
    return ExtParam(z, p, q, side)


@dataclass(frozen=True)
class BoundaryPoint:
    """A point (a : b) of CP^1; infinity is (1 : 0)."""

    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        m = max(abs(a), abs(b))
        if m == 0:
            raise ValueError("(0 : 0) is not a point")
        # rescale so the larger coordinate is exactly 1
        s = a if abs(a) >= abs(b) else b
        object.__setattr__(self, "a", a / s)
        object.__setattr__(self, "b", b / s)

    @classmethod
    def from_complex(cls, z: complex) -> "BoundaryPoint":
        return cls(complex(z), 1.0)

    @classmethod
    def infinity(cls) -> "BoundaryPoint":
        return cls(1.0, 0.0)

    def moved(self, g) -> "BoundaryPoint":
        """Image under the fractional linear map of a 2x2 matrix."""
        (a, b), (c, d) = g[0], g[1]
        return BoundaryPoint(a * self.a + b * self.b, c * self.a + d * self.b)

    def to_complex(self) -> complex:
        return complex("inf") if self.b == 0 else self.a / self.b


PointLike = Union[BoundaryPoint, complex, float]


def _as_point(x: PointLike) -> BoundaryPoint:
    if isinstance(x, BoundaryPoint):
        return x
    if isinstance(x, complex) and (math.isinf(x.real) or math.isinf(x.imag)):
        return BoundaryPoint.infinity()
    if isinstance(x, float) and math.isinf(x):
        return BoundaryPoint.infinity()
    return BoundaryPoint.from_complex(x)


def cross_ratio(z0: PointLike, z1: PointLike, z2: PointLike, z3: PointLike,
                tol: float = 1e-12) -> complex:
    """(z2-z1)(z3-z0) / ((z2-z0)(z3-z1)) computed projectively."""
    pts = [_as_point(x) for x in (z0, z1, z2, z3)]

    def gap(i, j):
        return pts[i].a * pts[j].b - pts[j].a * pts[i].b

    for i in range(4):
        for j in range(i + 1, 4):
            if abs(gap(i, j)) < tol:
                raise DegenerateSimplexError(f"vertices {i} and {j} coincide")
    return gap(2, 1) * gap(3, 0) / (gap(2, 0) * gap(3, 1))


def _edge_index(edge) -> int:
    if isinstance(edge, int):
        if not 0 <= edge < 6:
            raise IndexError(f"tet-edge index {edge} out of range")
        return edge
    return EDGE_INDEX[tuple(sorted(edge))]


def edge_param(t: FlatTriple, edge) -> complex:
    return t[EDGE_COMPONENT[_edge_index(edge)]]


def component_shape(z: complex, k: int) -> complex:
    """z, z' = 1/(1-z) or z'' = 1 - 1/z for component 0, 1, 2."""
    return (z, 1 / (1 - z), 1 - 1 / z)[k]


def parity_offset(t: FlatTriple, k: int, z: Optional[complex] = None,
                  side: Optional[int] = None) -> int:
    """Integer s with w_k = Log(shape_k) + s*pi*i."""
    if z is None:
        param = from_triple(t)
        z, side = param.z, param.side
    shape = component_shape(complex(z), k)
    # z -> 1/(1-z) and z -> 1 - 1/z preserve the upper half-plane, so a
    # real shape's side flag carries over unchanged
    s = (t[k] - principal_log(shape, side)) / (PI * 1j)
    s_int = round(s.real)
    if abs(s - s_int) > 1e-6:
        raise InvalidTripleError(f"log-parameter {t[k]} is not a branch of log({shape})")
    return s_int


def parity_param(t: FlatTriple, edge) -> int:
    return parity_offset(t, EDGE_COMPONENT[_edge_index(edge)]) % 2


# vertex reorderings by new order; Klein-equivalent orders give the same result
EVEN_PERMUTATIONS = {"012": (1, 2, 0, 3), "021": (2, 0, 1, 3)}
ODD_PERMUTATIONS = {"01": (1, 0, 2, 3), "02": (2, 1, 0, 3), "12": (0, 2, 1, 3)}


def _upper_even(z, p, q, cycle):
    if cycle == "012":
        return (1 / (1 - z), q, -1 - p - q), cmath.exp(1j * PI / 3 + q * PI * 1j)
    return (1 - 1 / z, -1 - p - q, p), cmath.exp(-1j * PI / 3 + p * PI * 1j)


def _upper_odd(z, p, q, transposition):
    if transposition == "01":
        return (1 / z, -p, 1 + p + q), cmath.exp(p * PI * 1j)
    if transposition == "02":
        return (1 - z, -q, -p), cmath.exp(1j * PI / 3)
    return (z / (z - 1), 1 + p + q, -q), cmath.exp(2j * PI / 3 + q * PI * 1j)


def _permute(param: ExtParam, key: str, rule):
    z = param.z
    if z.imag == 0.0:
        raise UnsupportedShapeError("vertex permutations of flat simplices are not supported")
    if z.imag > 0:
        (nz, np_, nq), w = rule(z, param.p, param.q, key)
        return ExtParam(nz, np_, nq), w
    (nz, np_, nq), w = rule(z.conjugate(), -param.p, -param.q, key)
    # conjugate the upper half-plane identity back
    return ExtParam(nz.conjugate(), -np_, -nq), 1 / w.conjugate()


def permute_even(param: ExtParam, cycle: str) -> tuple[ExtParam, complex]:
    """Reorder vertices by a 3-cycle.

    Returns ``(new, w)`` with ``[z;p,q] - new = chi(w)``.  ``cycle`` is
    ``"012"`` (z -> 1/(1-z)) or ``"021"`` (z -> 1 - 1/z).
    """
    if cycle not in EVEN_PERMUTATIONS:
        raise KeyError(f"unknown 3-cycle {cycle!r}")
    return _permute(param, cycle, _upper_even)


def permute_odd(param: ExtParam, transposition: str) -> tuple[ExtParam, complex]:
    """Reorder vertices by a transposition.

    Returns ``(new, w)`` with ``[z;p,q] + new = chi(w)``.  Transposition
    ``"01"`` gives 1/z, ``"02"`` gives 1 - z and ``"12"`` gives z/(z-1).
    """
    if transposition not in ODD_PERMUTATIONS:
        raise KeyError(f"unknown transposition {transposition!r}")
    return _permute(param, transposition, _upper_odd)

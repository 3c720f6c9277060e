"""Formal sums of cover points and the lifted five-term relation."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .branchlog import PI, DEFAULT_TOL, ModPiSquared, mod_pi2, r_value
from .flattening import (
    EDGE_INDEX,
    BoundaryPoint,
    ExtParam,
    FlatTriple,
    cross_ratio,
    edge_param,
    ell,
)
from .zsolve import solve_integer


class NoExtensionError(ValueError):
    pass


class DegenerateInstanceError(ValueError):
    pass


@dataclass(frozen=True)
class BlochSum:
    """Integer combination of cover points, kept normalized."""

    terms: tuple[tuple[int, ExtParam], ...] = ()

    def __post_init__(self):
        merged: dict[ExtParam, int] = {}
        for coef, param in self.terms:
            merged[param] = merged.get(param, 0) + int(coef)
        object.__setattr__(
            self, "terms", tuple((c, p) for p, c in merged.items() if c != 0)
        )

    @classmethod
    def of(cls, param: ExtParam, coef: int = 1) -> "BlochSum":
        return cls(((coef, param),))

    def __add__(self, other: "BlochSum") -> "BlochSum":
        return BlochSum(self.terms + other.terms)

    def __neg__(self) -> "BlochSum":
        return BlochSum(tuple((-c, p) for c, p in self.terms))

    def __sub__(self, other: "BlochSum") -> "BlochSum":
        return self + (-other)

    def __rmul__(self, k: int) -> "BlochSum":
        return BlochSum(tuple((k * c, p) for c, p in self.terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def r_sum(self) -> complex:
        """Sum of coefficient times R, not reduced."""
        return sum((c * r_value(p) for c, p in self.terms), 0j)

    def prebloch_projection(self) -> dict[complex, int]:
        """Forget the branch indices: coefficients per shape."""
        out: dict[complex, int] = {}
        for c, p in self.terms:
            out[p.z] = out.get(p.z, 0) + c
        return {z: c for z, c in out.items() if c}


def r_of_sum(s: BlochSum) -> ModPiSquared:
    return mod_pi2(s.r_sum())


def r_congruent(a: BlochSum, b: BlochSum, tol: float = DEFAULT_TOL) -> bool:
    return r_of_sum(a).isclose(r_of_sum(b), tol)


def chi(w: complex) -> BlochSum:
    """[w;0,1] - [w;0,0]; chi(1) is the empty sum."""
    w = complex(w)
    if w == 0:
        raise ValueError("chi(0) is undefined")
    if w == 1:
        return BlochSum()
    side = 1 if w.imag == 0.0 and not 0 < w.real < 1 else None
    return BlochSum(((1, ExtParam(w, 0, 1, side)), (-1, ExtParam(w, 0, 0, side))))


def transfer_expand(param: ExtParam) -> BlochSum:
    """Rewrite [x;p,q] using only branch indices in {0, 1}."""
    x, p, q, side = param.z, param.p, param.q, param.side
    pq = p * q
    return BlochSum((
        (pq, ExtParam(x, 1, 1, side)),
        (-(pq - p), ExtParam(x, 1, 0, side)),
        (-(pq - q), ExtParam(x, 0, 1, side)),
        (pq - p - q + 1, ExtParam(x, 0, 0, side)),
    ))


# ---------------------------------------------------------------------------
# five-term relation


def five_term_shapes(x: complex, y: complex) -> tuple[complex, ...]:
    return (x, y, y / x, (1 - 1 / x) / (1 - 1 / y), (1 - x) / (1 - y))


def developing_points(x: complex, y: complex) -> list[BoundaryPoint]:
    """Five boundary points whose omit-one cross-ratios are the five shapes.

    Uses z0 = inf, z1 = 0, z2 = 1, so the simplex omitting z4 has shape
    1/z3 and the one omitting z3 has shape 1/z4.
    """
    x4, x3 = (1 - x) / (1 - y), (1 - 1 / x) / (1 - 1 / y)
    return [
        BoundaryPoint.infinity(),
        BoundaryPoint.from_complex(0),
        BoundaryPoint.from_complex(1),
        BoundaryPoint.from_complex(1 / x4),
        BoundaryPoint.from_complex(1 / x3),
    ]


def omit_one(points: Sequence, k: int) -> list:
    return [pt for i, pt in enumerate(points) if i != k]


def _edge_rows(flats: Mapping[int, FlatTriple]):
    """For each of the ten edges: list of (simplex, local edge index)."""
    rows = []
    for a, b in combinations(range(5), 2):
        entries = []
        for k in range(5):
            if k in (a, b):
                continue
            local = [i - (i > k) for i in (a, b)]
            entries.append((k, EDGE_INDEX[tuple(local)]))
        rows.append(((a, b), entries))
    return rows


def verify_five_term_geometric(points: Sequence, flats: Sequence[FlatTriple],
                               tol: float = DEFAULT_TOL) -> bool:
    """Check the vanishing of all ten alternating edge sums."""
    if len(points) != 5 or len(flats) != 5:
        raise ValueError("need five points and five flattenings")
    for k in range(5):
        shape = cross_ratio(*omit_one(points, k))
        w0, w1 = flats[k].w0, flats[k].w1
        # exp(w0) = +-z and exp(-w1) = +-(1 - z)
        if min(abs(cmath.exp(w0) - s * shape) for s in (1, -1)) > 1e-7 * (1 + abs(shape)) or \
           min(abs(cmath.exp(-w1) - s * (1 - shape)) for s in (1, -1)) > 1e-7 * (1 + abs(shape)):
            raise ValueError(f"flattening {k} does not match the cross-ratio of its simplex")
    for _, entries in _edge_rows(dict(enumerate(flats))):
        total = sum((-1) ** k * edge_param(flats[k], e) for k, e in entries)
        if abs(total) > tol:
            return False
    return True


def _branch_system(points, fixed: Mapping[int, int]):
    """Integer system for (p_k, q_k) relative to principal logs.

    Unknowns are ordered p0, q0, p1, q1, ...; ``fixed`` pins columns.
    """
    shapes = [cross_ratio(*omit_one(points, k)) for k in range(5)]
    base = [ell(ExtParam(z, 0, 0, 1 if z.imag == 0 and not 0 < z.real < 1 else None))
            for z in shapes]
    coef = ((1, 0), (0, 1), (-1, -1))
    comp_of = (0, 2, 1, 1, 2, 0)
    rows, rhs = [], []
    for _, entries in _edge_rows({}):
        row = [0] * 10
        total = 0j
        for k, e in entries:
            sign = (-1) ** k
            c = comp_of[e]
            total += sign * base[k][c]
            row[2 * k] += sign * coef[c][0]
            row[2 * k + 1] += sign * coef[c][1]
        b = -total / (PI * 1j)
        bi = round(b.real)
        if abs(b - bi) > 1e-6:
            raise ValueError("points do not give a consistent five-term configuration")
        rows.append(row)
        rhs.append(bi)
    for j, v in sorted(fixed.items()):
        row = [0] * 10
        row[j] = 1
        rows.append(row)
        rhs.append(v)
    return shapes, rows, rhs


@dataclass(frozen=True)
class FiveTermInstance:
    x: complex
    y: complex
    params: tuple[ExtParam, ...]

    @property
    def branches(self) -> tuple[tuple[int, int], ...]:
        return tuple((p.p, p.q) for p in self.params)

    def bloch_sum(self) -> BlochSum:
        return BlochSum(tuple(((-1) ** i, p) for i, p in enumerate(self.params)))

    def flats(self) -> list[FlatTriple]:
        return [ell(p) for p in self.params]

    def points(self) -> list[BoundaryPoint]:
        return developing_points(self.x, self.y)

    def with_branches(self, branches: Sequence[tuple[int, int]]) -> "FiveTermInstance":
        """Same shapes, hand-supplied branch tuple (not checked)."""
        params = tuple(ExtParam(p.z, b[0], b[1], p.side) for p, b in zip(self.params, branches))
        return FiveTermInstance(self.x, self.y, params)


def _check_five_term_inputs(x: complex, y: complex) -> tuple[complex, ...]:
    x, y = complex(x), complex(y)
    for name, v in (("x", x), ("y", y)):
        if v == 0 or v == 1:
            raise DegenerateInstanceError(f"{name} = {v} is degenerate")
    if x == y:
        raise DegenerateInstanceError("x = y is degenerate")
    shapes = five_term_shapes(x, y)
    for i, s in enumerate(shapes):
        if abs(s) < 1e-14 or abs(1 - s) < 1e-14:
            raise DegenerateInstanceError(f"shape x{i} = {s} is degenerate")
    return shapes


def five_term_instance(x: complex, y: complex, p0: int = 0, q0: int = 0,
                       p1: int = 0, q1: int = 0, q2: int = 0) -> FiveTermInstance:
    """A lifted five-term instance with free branch data (p0,q0,p1,q1,q2).

    On the region where y is in the upper half-plane and x lies inside the
    triangle (0, 1, y) the remaining branches are

        p2 = p1 - p0, p3 = p1 - p0 + q1 - q0, q3 = q2 - q1,
        p4 = q1 - q0, q4 = q2 - q1 - p0.

    Elsewhere they are shifted by the analytic continuation of the
    principal branches, found from the edge equations.
    """
    shapes = _check_five_term_inputs(x, y)
    points = developing_points(complex(x), complex(y))
    _, rows, rhs = _branch_system(points, {0: p0, 1: q0, 2: p1, 3: q1, 5: q2})
    sol = solve_integer(rows, rhs, 10)
    if sol is None:
        raise DegenerateInstanceError("no lifted five-term instance with these branches")
    x0, kernel = sol
    if kernel:
        raise DegenerateInstanceError("branch data does not determine the instance")
    params = []
    for k, z in enumerate(shapes):
        side = 1 if z.imag == 0 and not 0 < z.real < 1 else None
        params.append(ExtParam(z, x0[2 * k], x0[2 * k + 1], side))
    return FiveTermInstance(complex(x), complex(y), tuple(params))


def continuation_offsets(x: complex, y: complex) -> tuple[tuple[int, int], ...]:
    """Branches of the instance with zero free data (all zero on FT+)."""
    return five_term_instance(x, y).branches


def nu_expressions(branches: Sequence[tuple[int, int]]) -> tuple[int, ...]:
    (p0, q0), (p1, q1), (p2, q2), (p3, q3), (p4, q4) = branches
    return (
        q0 - p2 - q2 + p3 + q3,
        p0 - q3 + q4,
        -q1 + q2 - q3,
        -p1 + p3 + q3 - p4 - q4,
        p2 - p3 + p4,
    )


def nu_vanishes(inst: FiveTermInstance) -> bool:
    """The five integer coefficient expressions, measured from the
    principal-branch base instance at the same (x, y)."""
    base = continuation_offsets(inst.x, inst.y)
    rel = [(p - bp, q - bq) for (p, q), (bp, bq) in zip(inst.branches, base)]
    return not any(nu_expressions(rel))


def in_upper_region(x: complex, y: complex) -> bool:
    """y in the upper half-plane and x strictly inside the triangle (0, 1, y)."""
    if y.imag <= 0:
        return False
    b = x.imag / y.imag
    a = x.real - b * y.real
    return a > 0 and b > 0 and a + b < 1


def extend_flattening(points: Sequence, known: Mapping[int, FlatTriple]) -> list[FlatTriple]:
    """Complete flattenings on some of the five simplices to all five.

    The completion is unique once three are known; with fewer, the
    particular solution from the integer solver is returned.
    """
    if len(points) != 5:
        raise ValueError("need five points")
    if len(known) > 5:
        raise ValueError("at most five simplices")
    fixed = {}
    shapes = [cross_ratio(*omit_one(points, k)) for k in range(5)]
    for k, t in known.items():
        z = shapes[k]
        side = 1 if z.imag == 0 and not 0 < z.real < 1 else None
        base = ell(ExtParam(z, 0, 0, side))
        p = (t.w0 - base.w0) / (PI * 1j)
        q = (t.w1 - base.w1) / (PI * 1j)
        pi, qi = round(p.real), round(q.real)
        if abs(p - pi) > 1e-6 or abs(q - qi) > 1e-6:
            raise NoExtensionError(f"flattening {k} does not match its simplex")
        fixed[2 * k], fixed[2 * k + 1] = pi, qi
    _, rows, rhs = _branch_system(points, fixed)
    sol = solve_integer(rows, rhs, 10)
    if sol is None:
        raise NoExtensionError("known flattenings violate an edge equation")
    x0, _ = sol
    out = []
    for k, z in enumerate(shapes):
        if k in known:
            out.append(known[k])
            continue
        side = 1 if z.imag == 0 and not 0 < z.real < 1 else None
        out.append(ell(ExtParam(z, x0[2 * k], x0[2 * k + 1], side)))
    return out

"""Integer branch data making the tracked shapes a flattening of the complex.

Unknowns are (p_0, q_0, p_1, q_1, ...), measured against the tracked logs of
a :class:`ShapeAssignment`.  Every row is an integer combination of
log-parameters; its constant part comes from the tracked logs and must be
an integer multiple of pi*i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .branchlog import PI, principal_log
from .ebloch import BlochSum
from .flattening import EDGE_COMPONENT, EDGE_INDEX, component_shape
from .shapes import FillingSpec, ShapeAssignment, cusp_vertices
from .tricomplex import LinkError, NormalCurve, OrderedTriangulation
from .zsolve import matvec, nullspace_mod2, solve_integer, solve_mod2

RESIDUE_TOL = 1e-6

# integer coefficient of (p, q) in each triple component
_PQ = ((1, 0), (0, 1), (-1, -1))


class FlatteningError(RuntimeError):
    pass


class InconsistentShapesError(FlatteningError):
    pass


@dataclass
class FlatteningSolution:
    pq: list[tuple[int, int]]
    parity_enforced: bool = True
    conditions_used: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def vector(self) -> list[int]:
        return [x for pair in self.pq for x in pair]


def _base_value(shapes: ShapeAssignment, t: int, k: int) -> complex:
    lz, l1 = complex(shapes.logz[t]), complex(shapes.log1mz[t])
    return (lz, -l1, l1 - lz)[k]


def _log_row(n: int, shapes: ShapeAssignment, terms, label: str):
    row = [0] * (2 * n)
    total = 0j
    for t, k, c in terms:
        total += c * _base_value(shapes, t, k)
        row[2 * t] += c * _PQ[k][0]
        row[2 * t + 1] += c * _PQ[k][1]
    b = -total / (PI * 1j)
    bi = round(b.real)
    if abs(b - bi) > RESIDUE_TOL:
        raise InconsistentShapesError(
            f"row '{label}': residue {b:.6g} is not an integer (wrong branches or unconverged shapes)")
    return row, bi


def _parity_offsets(shapes: ShapeAssignment, t: int) -> tuple[int, int, int]:
    """s_k with base log-parameter = Log(shape_k) + s_k * pi * i."""
    z, side = complex(shapes.z[t]), shapes.side[t]
    out = []
    for k in range(3):
        s = (_base_value(shapes, t, k) - principal_log(component_shape(z, k), side)) / (PI * 1j)
        si = round(s.real)
        if abs(s - si) > RESIDUE_TOL:
            raise InconsistentShapesError(f"tet {t}: log-parameter {k} is not a branch of its shape")
        out.append(si)
    return tuple(out)


def _parity_row(n: int, shapes: ShapeAssignment, curve: NormalCurve):
    row = [0] * (2 * n)
    const = 0
    for p in curve.passes:
        k = _component(p.edge)
        const += _parity_offsets(shapes, p.tet)[k]
        row[2 * p.tet] += _PQ[k][0]
        row[2 * p.tet + 1] += _PQ[k][1]
    return [v % 2 for v in row], (-const) % 2


def _component(edge) -> int:
    return EDGE_COMPONENT[EDGE_INDEX[tuple(sorted(edge))]]


def _count_row(n: int, terms):
    row = [0] * (2 * n)
    for t, k, c in terms:
        row[2 * t] += c * _PQ[k][0]
        row[2 * t + 1] += c * _PQ[k][1]
    return row


def build_flattening_system(tri: OrderedTriangulation, shapes: ShapeAssignment,
                            fillings: Optional[FillingSpec] = None, core_rows: bool = False):
    """Log rows (edges, cusps, material torus links) as an integer system.

    With ``core_rows`` each filled cusp also gets a row keeping the
    log-parameter along its (gamma, delta) curve at the tracked value.
    """
    fillings = dict(fillings or {})
    n = len(tri)
    rows, rhs, labels = [], [], []

    def add(terms, label):
        row, b = _log_row(n, shapes, terms, label)
        rows.append(row)
        rhs.append(b)
        labels.append(label)

    for k, ec in enumerate(tri.edges):
        add([(t, EDGE_COMPONENT[e], s) for t, e, s in ec.incidences], f"edge {k}")
    for ci, v in enumerate(cusp_vertices(tri)):
        basis = tri.cusp_basis(v)
        mer = tri.curve_terms(basis.meridian)
        lon = tri.curve_terms(basis.longitude)
        f = fillings.get(ci)
        if f is None:
            add(mer, f"cusp {ci} meridian")
            add(lon, f"cusp {ci} longitude")
        else:
            terms = [(t, k, f.alpha * c) for t, k, c in mer] + [(t, k, f.beta * c) for t, k, c in lon]
            add(terms, f"cusp {ci} filling ({f.alpha},{f.beta})")
            if core_rows:
                core = [(t, k, f.gamma * c) for t, k, c in mer] + [(t, k, f.delta * c) for t, k, c in lon]
                # shape logs differ from the base w2 by eps * pi * i
                rows.append(_count_row(n, core))
                rhs.append(sum(c * tri.signs[t] for t, k, c in core if k == 2))
                labels.append(f"cusp {ci} core ({f.gamma},{f.delta})")
    for lk in tri.links:
        if lk.genus > 1:
            raise LinkError(f"vertex {lk.vertex}: genus {lk.genus} links are not supported")
        if lk.genus == 1 and tri.labels is not None:
            # material torus vertex: every link curve must have zero log-parameter
            basis = tri.default_cusp_basis(lk.vertex)
            add(tri.curve_terms(basis.meridian), f"vertex {lk.vertex} link curve 0")
            add(tri.curve_terms(basis.longitude), f"vertex {lk.vertex} link curve 1")
    return rows, rhs, labels


def build_parity_system(tri: OrderedTriangulation, shapes: ShapeAssignment):
    n = len(tri)
    rows, rhs = [], []
    for curve in tri.normal_loop_basis():
        r, b = _parity_row(n, shapes, curve)
        rows.append(r)
        rhs.append(b)
    return rows, rhs


def _key(x: Sequence[int]):
    return (sum(abs(v) for v in x), max((abs(v) for v in x), default=0), tuple(x))


def _descend(x: list[int], moves: list[list[int]]) -> list[int]:
    """Greedy descent on (L1, Linf, lex) using +-moves."""
    moves = [m for m in moves if any(m)]
    improved = True
    while improved:
        improved = False
        for m in moves:
            for sgn in (1, -1):
                y = [a + sgn * b for a, b in zip(x, m)]
                if _key(y) < _key(x):
                    x = y
                    improved = True
    return x


def solve_flattening(tri: OrderedTriangulation, shapes: ShapeAssignment,
                     fillings: Optional[FillingSpec] = None) -> FlatteningSolution:
    """Integer branch data for every tetrahedron.

    Filled cusps first try the extra core rows, which make the solution
    follow the chosen (gamma, delta); without them any solution is valid
    and we fall back silently.
    """
    if fillings and any(f is not None for f in dict(fillings).values()):
        out = _solve(tri, shapes, fillings, core_rows=True)
        if out is not None and out.parity_enforced:
            return out
    out = _solve(tri, shapes, fillings, core_rows=False)
    if out is None:
        rows, _, labels = build_flattening_system(tri, shapes, fillings)
        raise FlatteningError("log-parameter conditions have no integer solution: "
                              + ", ".join(labels))
    return out


def _solve(tri, shapes, fillings, core_rows: bool) -> Optional[FlatteningSolution]:
    n = len(tri)
    rows, rhs, labels = build_flattening_system(tri, shapes, fillings, core_rows)
    sol = solve_integer(rows, rhs, 2 * n)
    if sol is None:
        return None
    x0, kernel = sol
    prow, prhs = build_parity_system(tri, shapes)
    warnings = []
    # parity of x0 + K y is P x0 + (P K) y mod 2
    px0 = matvec(prow, x0)
    pk = [matvec(prow, col) for col in kernel]  # one column per kernel vector
    pk_matrix = [[pk[j][i] for j in range(len(kernel))] for i in range(len(prow))]
    target = [(b - a) % 2 for a, b in zip(px0, prhs)]
    y = solve_mod2(pk_matrix, target, len(kernel)) if prow else []
    if y is None:
        parity_ok = False
        warnings.append("parity conditions could not be met; the result may differ by the element of order 2")
        moves = [list(k) for k in kernel]
        x = x0
    else:
        parity_ok = True
        x = [a + sum(yj * k[i] for yj, k in zip(y, kernel)) for i, a in enumerate(x0)]
        # kernel moves that keep every parity
        moves = [[sum(c * k[i] for c, k in zip(nv, kernel)) for i in range(2 * n)]
                 for nv in nullspace_mod2(pk_matrix, len(kernel))] if kernel else []
        moves += [[2 * v for v in k] for k in kernel]
    x = _descend(list(x), moves)
    assert matvec(rows, x) == list(rhs)
    pq = [(x[2 * t], x[2 * t + 1]) for t in range(n)]
    return FlatteningSolution(pq, parity_ok, labels + (["parity"] if prow else []), warnings)


def kernel_moves(tri: OrderedTriangulation, shapes: ShapeAssignment,
                 fillings: Optional[FillingSpec] = None) -> list[list[int]]:
    """Integer kernel of the log system (changes that keep it satisfied)."""
    rows, rhs, _ = build_flattening_system(tri, shapes, fillings)
    sol = solve_integer(rows, rhs, 2 * len(tri))
    return [] if sol is None else sol[1]


def audit(tri: OrderedTriangulation, shapes: ShapeAssignment, sol: FlatteningSolution,
          fillings: Optional[FillingSpec] = None) -> list[str]:
    """Rows that fail at the solution (empty when all conditions hold)."""
    rows, rhs, labels = build_flattening_system(tri, shapes, fillings)
    bad = [lab for row, b, lab in zip(rows, rhs, labels) if matvec([row], sol.vector)[0] != b]
    if sol.parity_enforced:
        prow, prhs = build_parity_system(tri, shapes)
        for i, (row, b) in enumerate(zip(prow, prhs)):
            if (matvec([row], sol.vector)[0] - b) % 2:
                bad.append(f"parity {i}")
    return bad


def beta_hat(tri: OrderedTriangulation, shapes: ShapeAssignment, sol: FlatteningSolution) -> BlochSum:
    params = shapes.ext_params(sol.pq)
    return BlochSum(tuple((eps, prm) for eps, prm in zip(tri.signs, params)))

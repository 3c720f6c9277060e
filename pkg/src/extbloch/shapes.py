"""Shapes of tetrahedra: from labels, or by solving the gluing equations.

Shapes carry continuous branches of log z and log(1 - z).  In tet ``t``
the logs of the three edge shapes z, z' = 1/(1-z), z'' = 1 - 1/z are

    log z,   -log(1 - z),   log(1 - z) - log z + sigma_t * pi * i

where ``sigma_t`` is the tetrahedron's orientation sign, so that the three
add up to ``sigma_t * pi * i`` as they do for the principal branches of a
simplex with the expected orientation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .branchlog import PI, principal_log
from .flattening import BoundaryPoint, ExtParam, FlatTriple, cross_ratio
from .tricomplex import LinkError, OrderedTriangulation


class SolverError(RuntimeError):
    pass


class DegenerateShapeError(ValueError):
    def __init__(self, message: str, tet: Optional[int] = None):
        super().__init__(message)
        self.tet = tet


@dataclass(frozen=True)
class ShapeAssignment:
    z: np.ndarray
    logz: np.ndarray
    log1mz: np.ndarray
    side: tuple = ()

    def __post_init__(self):
        for name in ("z", "logz", "log1mz"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=complex))
        if not self.side:
            object.__setattr__(self, "side", (None,) * len(self.z))

    def __len__(self) -> int:
        return len(self.z)

    @classmethod
    def from_logs(cls, logz, log1mz, side=()) -> "ShapeAssignment":
        logz = np.asarray(logz, dtype=complex)
        return cls(np.exp(logz), logz, np.asarray(log1mz, dtype=complex), side)

    @classmethod
    def principal(cls, zs: Sequence[complex], side=()) -> "ShapeAssignment":
        side = tuple(side) if side else (None,) * len(zs)
        logz = [principal_log(z, s) for z, s in zip(zs, side)]
        log1mz = [principal_log(1 - z, None if s is None else -s) for z, s in zip(zs, side)]
        return cls(np.asarray(zs, dtype=complex), logz, log1mz, side)

    def consistency_error(self) -> float:
        e1 = np.abs(np.exp(self.logz) - self.z) / np.maximum(1, np.abs(self.z))
        e2 = np.abs(np.exp(self.log1mz) - (1 - self.z)) / np.maximum(1, np.abs(1 - self.z))
        return float(max(e1.max(initial=0), e2.max(initial=0)))

    def flats(self, pq: Optional[Sequence[tuple[int, int]]] = None) -> list[FlatTriple]:
        """Log-parameter triples built on the tracked logs."""
        out = []
        for t in range(len(self)):
            p, q = (0, 0) if pq is None else pq[t]
            w0 = self.logz[t] + p * PI * 1j
            w1 = -self.log1mz[t] + q * PI * 1j
            out.append(FlatTriple(complex(w0), complex(w1), complex(-(w0 + w1))))
        return out

    def branch_shift(self, t: int) -> tuple[int, int]:
        """(a, b) with tracked logs = principal logs + (a, -b) * pi * i."""
        side = self.side[t]
        lz = principal_log(self.z[t], side)
        l1 = principal_log(1 - self.z[t], None if side is None else -side)
        a = (self.logz[t] - lz) / (PI * 1j)
        b = (l1 - self.log1mz[t]) / (PI * 1j)
        ai, bi = round(a.real), round(b.real)
        if abs(a - ai) > 1e-6 or abs(b - bi) > 1e-6:
            raise ValueError(f"tet {t}: tracked logs are not branches of the principal logs")
        return ai, bi

    def ext_params(self, pq: Sequence[tuple[int, int]]) -> list[ExtParam]:
        """Cover points for branch data measured against the tracked logs."""
        out = []
        for t, (p, q) in enumerate(pq):
            a, b = self.branch_shift(t)
            out.append(ExtParam(complex(self.z[t]), p + a, q + b, self.side[t]))
        return out

    def log_shapes(self, signs: Sequence[int]) -> list[tuple[complex, complex, complex]]:
        out = []
        for t in range(len(self)):
            lz, l1 = complex(self.logz[t]), complex(self.log1mz[t])
            out.append((lz, -l1, l1 - lz + signs[t] * PI * 1j))
        return out


@dataclass(frozen=True)
class Filling:
    alpha: int
    beta: int
    gamma: Optional[int] = None
    delta: Optional[int] = None

    def __post_init__(self):
        a, b = int(self.alpha), int(self.beta)
        if math.gcd(a, b) != 1:
            raise ValueError(f"filling ({a},{b}) is not primitive")
        g, d = self.gamma, self.delta
        if g is None or d is None:
            g, d = _complete_basis(a, b)
        if a * d - b * g != 1:
            raise ValueError(f"(gamma, delta) = ({g}, {d}) does not satisfy alpha*delta - beta*gamma = 1")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "gamma", int(g))
        object.__setattr__(self, "delta", int(d))


def _complete_basis(a: int, b: int) -> tuple[int, int]:
    """(gamma, delta) with a*delta - b*gamma = 1 and 0 <= delta < |b|."""
    if b == 0:
        return 0, a  # a = +-1
    old_r, r, old_x, x, old_y, y = a, b, 1, 0, 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_x, x = x, old_x - quo * x
        old_y, y = y, old_y - quo * y
    # a*old_x + b*old_y = old_r = +-1
    d, g = old_x * old_r, -old_y * old_r
    k = d // b if b > 0 else -(d // -b)
    return g - k * a, d - k * b


FillingSpec = Mapping[int, Optional[Filling]]


@dataclass
class GluingSystem:
    coef_logz: np.ndarray  # rows x n integers
    coef_log1mz: np.ndarray
    const: np.ndarray  # complex constant added to each row
    target: np.ndarray
    rows: list[str] = field(default_factory=list)

    def residual(self, logz, log1mz) -> np.ndarray:
        return self.coef_logz @ logz + self.coef_log1mz @ log1mz + self.const - self.target

    def with_target(self, target) -> "GluingSystem":
        return GluingSystem(self.coef_logz, self.coef_log1mz, self.const,
                            np.asarray(target, dtype=complex), list(self.rows))


def cusp_vertices(tri: OrderedTriangulation) -> list[int]:
    """Vertex classes treated as cusps: torus links of an unlabeled complex."""
    if tri.labels is not None:
        return []
    return [lk.vertex for lk in tri.links if lk.genus == 1]


def _row_from_terms(n: int, terms, signs):
    cz, c1 = np.zeros(n), np.zeros(n)
    const = 0j
    for t, k, c in terms:
        if k == 0:
            cz[t] += c
        elif k == 1:
            c1[t] -= c
        else:
            cz[t] -= c
            c1[t] += c
            const += c * signs[t] * PI * 1j
    return cz, c1, const


def build_gluing_system(tri: OrderedTriangulation, fillings: Optional[FillingSpec] = None) -> GluingSystem:
    fillings = dict(fillings or {})
    for lk in tri.links:
        if lk.genus > 1:
            raise LinkError(f"vertex {lk.vertex} has a genus {lk.genus} link")
    n, signs = len(tri), tri.signs
    rows = []
    for k, ec in enumerate(tri.edges):
        terms = [(t, _comp(e), s) for t, e, s in ec.incidences]
        rows.append((terms, 2 * PI * 1j, f"edge {k}"))
    cusps = cusp_vertices(tri)
    unknown = set(fillings) - set(range(len(cusps)))
    if unknown:
        raise ValueError(f"no cusp with index {sorted(unknown)}")
    if tri.labels is not None and any(lk.genus == 1 for lk in tri.links):
        raise LinkError("labeled complex with torus links cannot be solved geometrically")
    for ci, v in enumerate(cusps):
        basis = tri.cusp_basis(v)
        mer = tri.curve_terms(basis.meridian)
        lon = tri.curve_terms(basis.longitude)
        f = fillings.get(ci)
        if f is None:
            rows.append((mer, 0j, f"cusp {ci} meridian"))
            rows.append((lon, 0j, f"cusp {ci} longitude"))
        else:
            terms = [(t, k, f.alpha * c) for t, k, c in mer] + \
                    [(t, k, f.beta * c) for t, k, c in lon]
            rows.append((terms, 2 * PI * 1j, f"cusp {ci} filling ({f.alpha},{f.beta})"))
    cz = np.zeros((len(rows), n))
    c1 = np.zeros((len(rows), n))
    const = np.zeros(len(rows), dtype=complex)
    target = np.zeros(len(rows), dtype=complex)
    for r, (terms, tgt, _) in enumerate(rows):
        cz[r], c1[r], const[r] = _row_from_terms(n, terms, signs)
        target[r] = tgt
    return GluingSystem(cz, c1, const, target, [d for _, _, d in rows])


def _comp(edge_index: int) -> int:
    return (0, 2, 1, 1, 2, 0)[edge_index]


def default_initial_shapes(signs: Sequence[int]) -> ShapeAssignment:
    z0 = cmath.exp(1j * PI / 3) * (1 + 0.1j)
    z0 /= abs(z0)
    return ShapeAssignment.principal([z0 if s > 0 else z0.conjugate() for s in signs])


def solve_newton(system: GluingSystem, init: Optional[ShapeAssignment] = None,
                 signs: Optional[Sequence[int]] = None, tol: float = 1e-12,
                 max_iter: int = 100) -> ShapeAssignment:
    """Damped least-squares Newton iteration in the logarithms of the shapes."""
    n = system.coef_logz.shape[1]
    if init is None:
        init = default_initial_shapes(signs if signs is not None else [1] * n)
    logz = init.logz.copy()
    log1mz = init.log1mz.copy()
    z = np.exp(logz)
    res = system.residual(logz, log1mz)
    norm = np.abs(res).max(initial=0)
    for _ in range(max_iter):
        if norm < tol:
            return ShapeAssignment(z, logz, log1mz)
        jac = system.coef_logz + system.coef_log1mz * (-z / (1 - z))
        step = np.linalg.lstsq(jac, -res, rcond=None)[0]
        t = 1.0
        for _ in range(40):
            new_logz = logz + t * step
            new_z = np.exp(new_logz)
            if np.all(np.abs(new_z) > 1e-12) and np.all(np.abs(1 - new_z) > 1e-12):
                ratio = (1 - new_z) / (1 - z)
                incr = np.log(ratio)
                if np.all(np.abs(incr.imag) < 1.0):
                    new_log1mz = log1mz + incr
                    new_res = system.residual(new_logz, new_log1mz)
                    new_norm = np.abs(new_res).max(initial=0)
                    if new_norm < norm or new_norm < tol:
                        break
            t /= 2
        else:
            raise SolverError(f"Newton stalled with residual {norm:.3e}")
        logz, log1mz, z, res, norm = new_logz, new_log1mz, new_z, new_res, new_norm
        # resynchronize z with its logarithm
        log1mz = log1mz + (np.log((1 - z) / np.exp(log1mz)))
    if norm < tol:
        return ShapeAssignment(z, logz, log1mz)
    raise SolverError(f"Newton did not converge in {max_iter} iterations (residual {norm:.3e})")


def solve_complete(tri: OrderedTriangulation, tol: float = 1e-12) -> ShapeAssignment:
    system = build_gluing_system(tri)
    return solve_newton(system, signs=tri.signs, tol=tol)


def continue_to_filling(tri: OrderedTriangulation, complete: ShapeAssignment,
                        fillings: FillingSpec, steps: int = 32, tol: float = 1e-12,
                        max_depth: int = 10) -> ShapeAssignment:
    """Follow the filled equations from the complete structure.

    The filling rows' right-hand side moves linearly from 0 to 2*pi*i;
    failed steps are halved up to ``max_depth`` times.
    """
    system = build_gluing_system(tri, fillings)
    filled = np.array([r.startswith("cusp") and "filling" in r for r in system.rows])
    final = system.target.copy()
    start = np.where(filled, 0, final)
    current = complete
    s, ds = 0.0, 1.0 / steps
    min_ds = ds / 2 ** max_depth
    while s < 1.0:
        ds = min(ds, 1.0 - s)
        nxt = s + ds
        try:
            sol = solve_newton(system.with_target(start + nxt * (final - start)), current, tol=tol)
        except SolverError:
            ds /= 2
            if ds < min_ds:
                raise SolverError(f"continuation failed near parameter {s:.6f}")
            continue
        current, s = sol, nxt
    return current


def holonomies(tri: OrderedTriangulation, shapes: ShapeAssignment, cusp: int) -> tuple[complex, complex]:
    """(u, v): log-holonomies of meridian and longitude in shape logs."""
    v = cusp_vertices(tri)[cusp]
    basis = tri.cusp_basis(v)
    logs = shapes.log_shapes(tri.signs)
    out = []
    for curve in (basis.meridian, basis.longitude):
        out.append(sum((c * logs[t][k] for t, k, c in tri.curve_terms(curve)), 0j))
    return out[0], out[1]


def complex_length(tri: OrderedTriangulation, shapes: ShapeAssignment, cusp: int,
                   gamma: int, delta: int) -> complex:
    u, v = holonomies(tri, shapes, cusp)
    return -(gamma * u + delta * v)


def shapes_from_labels(tri: OrderedTriangulation, base_points: Sequence) -> ShapeAssignment:
    """Cross-ratios of g_k z_v over the vertices of each tetrahedron."""
    if tri.labels is None:
        raise ValueError("triangulation has no labels")
    pts = [p if isinstance(p, BoundaryPoint) else BoundaryPoint.from_complex(p)
           for p in base_points]
    if len(pts) < tri.num_vertices:
        raise ValueError("need one base point per vertex class")
    zs, side = [], []
    for t, labels in enumerate(tri.labels):
        moved = [pts[tri.vertex_class[(t, k)]].moved(labels[k]) for k in range(4)]
        try:
            z = cross_ratio(*moved, tol=1e-9)
        except ValueError as exc:
            raise DegenerateShapeError(f"tet {t}: {exc}", t) from exc
        if abs(z.imag) < 1e-13 * max(1.0, abs(z)):
            z = complex(z.real, 0.0)
        zs.append(z)
        side.append(tri.signs[t] if z.imag == 0 and not 0 < z.real < 1 else None)
    return ShapeAssignment.principal(zs, side)

"""Volume and Chern-Simons invariant from the extended Bloch group element.

With R the lifted Rogers dilogarithm, ``i*(vol + i*cs) = R(beta)`` modulo
pi^2, so ``vol = Im R`` and ``cs = -Re R`` (mod pi^2).  Snap-style output
reports ``cs / (2 pi^2)`` modulo 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .branchlog import PI, PI2, ModPiSquared, bloch_wigner, mod_pi2
from .ebloch import BlochSum, chi
from .flatten_solver import FlatteningSolution, beta_hat, solve_flattening
from .flattening import BoundaryPoint, DegenerateSimplexError
from .shapes import (
    DegenerateShapeError,
    FillingSpec,
    ShapeAssignment,
    complex_length,
    continue_to_filling,
    shapes_from_labels,
    solve_complete,
)
from .tricomplex import OrderedTriangulation, cycle_from_homogeneous_chain


@dataclass
class InvariantReport:
    volume: float
    cs: float
    cs_over_2pi2: float
    beta: BlochSum
    method: str
    r_value: ModPiSquared
    warnings: list[str] = field(default_factory=list)
    complex_lengths: list[complex] = field(default_factory=list)


def report_from_r(r: complex, beta: BlochSum, method: str, warnings=(), lengths=()) -> InvariantReport:
    m = mod_pi2(r)
    cs = (-m.real) % PI2
    return InvariantReport(volume=m.imag, cs=cs, cs_over_2pi2=(cs / (2 * PI2)) % 0.5,
                           beta=beta, method=method, r_value=m, warnings=list(warnings),
                           complex_lengths=list(lengths))


def vol_cs_direct(beta: BlochSum, warnings=()) -> InvariantReport:
    return report_from_r(beta.r_sum(), beta, "direct", warnings)


def vol_cs_corrected(tri: OrderedTriangulation, continued: ShapeAssignment,
                     transported: FlatteningSolution, fillings: FillingSpec) -> InvariantReport:
    """Filled invariant from the complete structure's flattening, carried
    continuously to the filled shapes, plus one chi term per filled cusp."""
    if transported is None or continued is None:
        raise ValueError("continuation data missing")
    beta = beta_hat(tri, continued, transported)
    lengths = []
    for ci, f in sorted(dict(fillings).items()):
        if f is None:
            continue
        lam = complex_length(tri, continued, ci, f.gamma, f.delta)
        lengths.append(lam)
        beta = beta - chi(np.exp(lam))
    return report_from_r(beta.r_sum(), beta, "corrected", transported.warnings, lengths)


def vol_cs_from_lengths(lengths: Sequence[complex], terms: BlochSum) -> complex:
    """(vol + i cs) = -(pi/2) sum(lambda) - i sum(eps R(x'; p', q'))."""
    return -(PI / 2) * sum(lengths, 0j) - 1j * terms.r_sum()


def bloch_wigner_volume(shapes: ShapeAssignment, signs: Sequence[int]) -> float:
    return float(sum(s * bloch_wigner(complex(z)) for s, z in zip(signs, shapes.z)))


# ---------------------------------------------------------------------------
# pipelines


@dataclass
class PipelineResult:
    reports: list[InvariantReport]
    shapes: ShapeAssignment
    solution: FlatteningSolution


def manifold_invariants(tri: OrderedTriangulation, fillings: Optional[FillingSpec] = None,
                        method: str = "direct", tol: float = 1e-12, steps: int = 32) -> PipelineResult:
    """Solve shapes and flattenings for a cusped triangulation and report."""
    fillings = {k: v for k, v in dict(fillings or {}).items() if v is not None}
    if method not in ("direct", "corrected", "both"):
        raise ValueError(f"unknown method {method!r}")
    complete = solve_complete(tri, tol=tol)
    if not fillings:
        sol = solve_flattening(tri, complete)
        rep = vol_cs_direct(beta_hat(tri, complete, sol), sol.warnings)
        reports = [rep]
        if method in ("corrected", "both"):
            corr = vol_cs_corrected(tri, complete, sol, {})
            reports = [corr] if method == "corrected" else [rep, corr]
        return PipelineResult(reports, complete, sol)
    filled = continue_to_filling(tri, complete, fillings, steps=steps, tol=tol)
    reports = []
    sol = None
    if method in ("direct", "both"):
        sol = solve_flattening(tri, filled, fillings)
        reports.append(vol_cs_direct(beta_hat(tri, filled, sol), sol.warnings))
    if method in ("corrected", "both"):
        transported = solve_flattening(tri, complete)
        reports.append(vol_cs_corrected(tri, filled, transported, fillings))
        sol = sol or transported
    return PipelineResult(reports, filled, sol)


def labeled_invariants(tri: OrderedTriangulation, base_points: Sequence) -> PipelineResult:
    shapes = shapes_from_labels(tri, base_points)
    sol = solve_flattening(tri, shapes)
    return PipelineResult([vol_cs_direct(beta_hat(tri, shapes, sol), sol.warnings)], shapes, sol)


def random_base_points(count: int, rng: np.random.Generator) -> list[BoundaryPoint]:
    return [BoundaryPoint.from_complex(complex(*rng.normal(size=2))) for _ in range(count)]


def labeled_invariants_seeded(tri: OrderedTriangulation, seed: int = 0,
                              retries: int = 20) -> PipelineResult:
    rng = np.random.default_rng(seed)
    last = None
    for _ in range(retries):
        try:
            return labeled_invariants(tri, random_base_points(tri.num_vertices, rng))
        except (DegenerateShapeError, DegenerateSimplexError) as exc:
            last = exc
    raise DegenerateShapeError(f"no generic base points after {retries} draws: {last}")


def rotation(theta: float) -> np.ndarray:
    """Element of PSL(2,R) fixing i; rotation of the disc by 2*theta."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


def lens_chain(n: int, h1: np.ndarray, h2: np.ndarray):
    """sum_j <h1, g h1, g^j h2, g^(j+1) h2> with g of order n in PSL(2,R)."""
    g = rotation(PI / n)
    chain = []
    gj = np.eye(2, dtype=complex)
    for _ in range(n):
        chain.append((1, [h1, g @ h1, gj @ h2, g @ gj @ h2]))
        gj = g @ gj
    return chain


def boundary_chain(labels: Sequence[np.ndarray]):
    """Alternating boundary of a homogeneous 4-simplex (a null-homologous 3-cycle)."""
    return [((-1) ** i, [g for j, g in enumerate(labels) if j != i]) for i in range(5)]


def _lens_complex(n: int, rng: np.random.Generator) -> OrderedTriangulation:
    if n == 1:
        # g would be trivial; L(1,1) is the 3-sphere, represented by a boundary
        angles = rng.uniform(0, PI, size=5)
        return cycle_from_homogeneous_chain(boundary_chain([rotation(a) for a in angles]), "L(1,1)")
    a1, a2 = rng.uniform(0, PI, size=2)
    return cycle_from_homogeneous_chain(lens_chain(n, rotation(a1), rotation(a2)), f"L({n},1)")


def lens_space_class(n: int, seed: int = 0, retries: int = 20):
    """beta and report for the generator of H_3 of L(n,1) mapped to PSL(2,C)."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    last = None
    for _ in range(retries):
        try:
            tri = _lens_complex(n, rng)
            res = labeled_invariants(tri, random_base_points(tri.num_vertices, rng))
            return res.reports[0].beta, res.reports[0]
        except (DegenerateShapeError, DegenerateSimplexError) as exc:
            last = exc
    raise DegenerateShapeError(f"no generic choice after {retries} draws: {last}")

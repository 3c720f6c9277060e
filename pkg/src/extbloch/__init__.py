"""Extended Bloch group invariants of triangulated 3-manifolds.

The usual entry points::

    from extbloch import parse, manifold_invariants
    tri = parse(open("m004.tri.json").read())
    report = manifold_invariants(tri).reports[0]
    report.volume, report.cs
"""

from .branchlog import ModPiSquared, dilog, mod_pi2, principal_log, r_value, rogers
from .ebloch import BlochSum, chi, five_term_instance, r_of_sum, transfer_expand
from .flattening import BoundaryPoint, ExtParam, FlatTriple, cross_ratio, ell, from_triple
from .flatten_solver import FlatteningSolution, beta_hat, solve_flattening
from .invariants import (
    InvariantReport,
    bloch_wigner_volume,
    lens_space_class,
    manifold_invariants,
    vol_cs_corrected,
    vol_cs_direct,
)
from .shapes import Filling, ShapeAssignment, build_gluing_system, continue_to_filling, solve_newton
from .tricomplex import OrderedTriangulation, bundled, cycle_from_homogeneous_chain, parse, serialize

__version__ = "0.1.0"

__all__ = [
    "ModPiSquared",
    "dilog",
    "mod_pi2",
    "principal_log",
    "r_value",
    "rogers",
    "BlochSum",
    "chi",
    "five_term_instance",
    "r_of_sum",
    "transfer_expand",
    "BoundaryPoint",
    "ExtParam",
    "FlatTriple",
    "cross_ratio",
    "ell",
    "from_triple",
    "FlatteningSolution",
    "beta_hat",
    "solve_flattening",
    "InvariantReport",
    "bloch_wigner_volume",
    "lens_space_class",
    "manifold_invariants",
    "vol_cs_corrected",
    "vol_cs_direct",
    "Filling",
    "ShapeAssignment",
    "build_gluing_system",
    "continue_to_filling",
    "solve_newton",
    "OrderedTriangulation",
    "bundled",
    "cycle_from_homogeneous_chain",
    "parse",
    "serialize",
]

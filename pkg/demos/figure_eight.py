"""Volume and Chern-Simons invariant of the figure-eight knot complement.

Two regular ideal tetrahedra glue up to the figure-eight complement.  We
solve the gluing equations, find integer branch data, and read off
vol + i cs from the lifted Rogers dilogarithm.
"""

from extbloch import bundled, manifold_invariants
from extbloch.flatten_solver import audit

tri = bundled("m004")
print(f"{tri.name}: {len(tri)} tetrahedra, {len(tri.edges)} edge classes, signs {tri.signs}")

res = manifold_invariants(tri)
rep = res.reports[0]
print("shapes:", ", ".join(f"{complex(z):.12f}" for z in res.shapes.z))
print("branch data (p, q) per tetrahedron:", res.solution.pq)
print("conditions used:", ", ".join(res.solution.conditions_used))
print("failed conditions:", audit(tri, res.shapes, res.solution) or "none")
print()
for coef, prm in rep.beta:
    print(f"  {coef:+d} [{prm.z:.6f}; {prm.p}, {prm.q}]")
print(f"volume     {rep.volume:.15f}")
print(f"cs mod pi^2 {rep.cs:.3e}   (amphichiral, so zero)")

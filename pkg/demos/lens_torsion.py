"""Torsion classes from lens spaces.

L(n,1) maps to PSL(2,C) through a rotation of order n.  Triangulating the
resulting 3-cycle and flattening it gives a Bloch group element whose
lifted dilogarithm is pi^2/n.  Volume is zero: everything lives on a
circle of the boundary.
"""

import math

from extbloch import lens_space_class

for n in range(1, 9):
    beta, rep = lens_space_class(n, seed=n)
    r = rep.r_value
    target = (math.pi ** 2 / n) % math.pi ** 2
    print(f"L({n},1): {len(beta):3d} terms  R = {r.real:.12f} {r.imag:+.1e}i   pi^2/n = {target:.12f}")

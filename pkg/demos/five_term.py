"""The lifted five-term relation, checked on random configurations.

Five points on the boundary sphere span five ideal tetrahedra.  Integer
branch data obeying the edge conditions makes the alternating sum of
lifted dilogarithms vanish modulo pi^2; breaking the conditions does not.
"""

import numpy as np

from extbloch import BlochSum, ExtParam
from extbloch.ebloch import continuation_offsets, five_term_instance, nu_vanishes, r_of_sum

rng = np.random.default_rng(1)
y = 0.4 + 1.3j
x = 0.3 + 0.25 * y
inst = five_term_instance(x, y, 2, -1, 0, 3, 1)
print("shapes   :", ", ".join(f"{p.z:.4f}" for _, p in inst.bloch_sum()))
print("branches :", [(p.p, p.q) for _, p in inst.bloch_sum()])
print("offsets  :", continuation_offsets(x, y))
print(f"residual : {r_of_sum(inst.bloch_sum()).distance(0):.2e}")

# tamper with one branch: the sum now misses by a multiple of pi*log
coef, prm = inst.bloch_sum().terms[0]
bad = inst.bloch_sum() + coef * (BlochSum.of(ExtParam(prm.z, prm.p + 1, prm.q)) - BlochSum.of(prm))
print(f"tampered : {r_of_sum(bad).distance(0):.2e}")

worst, vanishing = 0.0, 0
for _ in range(500):
    yy = complex(rng.uniform(-2, 2), rng.uniform(0.1, 2))
    a, b = rng.uniform(0.05, 0.45, size=2)
    inst = five_term_instance(a + b * yy, yy, *map(int, rng.integers(-4, 5, size=5)))
    vanishing += nu_vanishes(inst)
    worst = max(worst, r_of_sum(inst.bloch_sum()).distance(0))
print(f"500 random instances, worst residual {worst:.2e}, {vanishing} with all nu zero")

"""The cycloid arch gives pi through two support formulas.

One uses arccos of the normalized direction, the other an arctan rewrite.
They produce the same squared term at every node, so the totals agree to
rounding.  The cycloid lies on the far side of its tangents, so the plain
terms are negative.
"""

import math

from sl2sum import SumControls, get_curve, sum_cycloid_arctan, sum_power
from sl2sum.geomoracle import region_area

cycloid = get_curve("cycloid")
print("root term:", float(cycloid.node_terms(1.0, 0.0, 0.0, 1.0)))
for eps in (1e-3, 1e-5, 1e-7):
    a = sum_power(cycloid, SumControls(2, eps))
    b = sum_cycloid_arctan(SumControls(2, eps))
    print(f"eps={eps:g}: arccos {a.value:.12f}  arctan {b.value:.12f}  diff {a.value - b.value:.1e}")
print("pi                =", math.pi)
print("2 x region area   =", 2 * region_area(cycloid))

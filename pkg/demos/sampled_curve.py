"""Sum over a curve given only as points: a quarter ellipse x = 2 cos t, y = sin t.

Without a closed form the tail is an estimate.  Twice the area between the arc
and its two axis-parallel tangents is what the squared terms should add up to.
"""

import math

import numpy as np

from sl2sum import SumControls, sum_power
from sl2sum.geomoracle import region_area
from sl2sum.support import SampledCurve, curve_from_samples

t = np.linspace(0.0, math.pi / 2, 20001)
ellipse = curve_from_samples(SampledCurve(np.stack([2 * np.cos(t), np.sin(t)], axis=1)))
exact = 2 * (2 - math.pi / 2)  # corner rectangle 2 x 1 minus a quarter of the ellipse
print("2 x region area (polygon) :", 2 * region_area(ellipse))
print("2 x region area (exact)   :", exact)
for eps in (1e-3, 1e-4, 1e-5):
    r = sum_power(ellipse, SumControls(2, eps))
    print(f"eps={eps:g}: F(2)={r.value:.8f}  nodes={r.nodes_used:,}  estimated tail {r.tail_magnitude:.1e}")

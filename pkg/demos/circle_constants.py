"""Walk the tree for the unit circle and watch both constants appear.

Each node (a, b; c, d) contributes the gap between the tangent with normal
(a+c, b+d) and the corner cut by the tangents with normals (a, b), (c, d).
Squared gaps add up to 2 - pi/2 (twice the corner area outside the quarter
disk); plain gaps add up to 2 (the two unit tangent segments).
"""

import math

from sl2sum import SumControls, get_curve, sum_power

circle = get_curve("circle")

print("Squared terms, target 2 - pi/2 =", 2 - math.pi / 2)
for eps in (1e-3, 1e-5, 1e-7, 1e-9):
    r = sum_power(circle, SumControls(2, eps))
    print(f"  eps={eps:<6g} nodes={r.nodes_used:>9,}  F={r.value:.12f}"
          f"  F+tail={r.value + r.tail_magnitude:.12f}")

print("\nFirst powers, target 2. The terms decay slowly, so the tail stays visible.")
checkpoints = []
r = sum_power(circle, SumControls(1, 1e-9),
              on_block=lambda n, v: checkpoints.append((n, v)))
for n, v in checkpoints[:: max(1, len(checkpoints) // 6)]:
    print(f"  after {n:>10,} nodes: {v:.8f}")
print(f"  final: {r.value:.8f} with certified tail {r.tail_magnitude:.2e}"
      f" -> {r.value + r.tail_magnitude:.12f}")

"""The parabola y = 1 - (x - y)^2 and the coprime Mordell-Tornheim sum.

With S = a + b and T = c + d the node term is 1/(4 S T (S + T)).  Each
coprime pair (S, T) shows up at exactly one node, so the first-power tree
sum is a quarter of  sum over coprime (b, d) of 1/(b d (b + d)),  which is
zeta-free: the full double sum is 2 zeta(3) and the gcd factor is zeta(3).
"""

from itertools import islice

from sl2sum import SumControls, get_curve, sum_power
from sl2sum.tornheim import TornheimQuery, coprime_pairs_via_tree, parabola_weighted_sum, tornheim_coprime

pairs = list(coprime_pairs_via_tree(6))
print("coprime pairs in [1,6]^2 reached through tree mediants:", len(pairs))
print("  first few:", list(islice(pairs, 8)))

for s in (1.0, 2.0):
    z = tornheim_coprime(TornheimQuery(s, mode="zeta"))
    d = tornheim_coprime(TornheimQuery(s, cutoff=2000, mode="direct"))
    print(f"\ns={s:g}: zeta path {z.value:.15f}   direct {d.value:.15f}"
          f"   (grid {d.extra['grid_sum']:.10f} + outside {d.tail_magnitude:.2e})")

print("\nweighted tree sum, first powers:")
print("  via zeta relation:", parabola_weighted_sum(1.0).value)
tree = sum_power(get_curve("parabola"), SumControls(1, 1e-9))
print(f"  by walking the tree: {tree.value:.8f} + certified tail {tree.tail_magnitude:.2e}")
print("  squared terms:", sum_power(get_curve("parabola"), SumControls(2, 1e-7)).value,
      "vs 1/48 =", 1 / 48)

"""Two series over the convergents of a continued fraction.

    sum |p_k - alpha q_k| r_{k+1} = alpha + 1
    sum (p_k - alpha q_k)^2 r_{k+1} = alpha

The first converges like the residuals themselves, so for the golden ratio
(all quotients 1, slowest possible) it needs many terms.
"""

from sl2sum.contfrac import Surd, expand, series_abs, series_sq

for spec, n in (("phi", 40), ("phi", 80), ((1, 2, 1), 30), ("pi", 40), ("e", 40), ("3.14159", 40)):
    e = expand(spec, n)
    a = float(e.alpha)
    flags = "terminated" if e.terminated else "precision exhausted" if e.precision_exhausted else ""
    print(f"{str(spec):>10} n={len(e.quotients):<3} quotients {list(e.quotients[:8])}...")
    print(f"{'':>10} abs {series_abs(e) - (a + 1):+.2e}   sq {series_sq(e) - a:+.2e}   {flags}")

print("\n(3 + sqrt 13)/2 is periodic:", expand(Surd(3, 13, 2), 12).quotients)

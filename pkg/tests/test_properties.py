"""Randomized invariants."""

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, settings, strategies as st

from sl2sum import SumControls, children, get_curve, locate, mediant, mixed_sum
from sl2sum.contfrac import Surd, expand
from sl2sum.lattice import UnimodularPair, depth_of

coords = st.integers(min_value=1, max_value=10**12)


@given(coords, coords)
def test_locate_mediant_round_trip(x, y):
    assume(math.gcd(x, y) == 1 and (x, y) != (1, 0))
    node = locate((x, y))
    m = mediant(node)
    assert (m.v1, m.v2) == (x, y)
    assert node.det == 1


@given(st.lists(st.booleans(), max_size=60))
def test_children_preserve_determinant_and_locate(path):
    p = UnimodularPair(1, 0, 0, 1)
    for right in path:
        p = children(p)[int(right)]
        assert p.det == 1
    assert depth_of(p) == len(path)
    m = mediant(p)
    assert locate((m.v1, m.v2)) == p


@pytest.mark.parametrize("name", ["circle", "parabola", "hyperbola", "cycloid",
                                  "cycloid-arctan", "tractrix", "astroid"])
@given(a=st.floats(0.05, 50), b=st.floats(0.05, 50), lam=st.floats(0.01, 100))
@settings(max_examples=60, deadline=None)
def test_support_homogeneity(name, a, b, lam):
    g = get_curve(name).gamma
    base = float(g(a, b))
    scaled = float(g(lam * a, lam * b))
    assert scaled == pytest.approx(lam * base, rel=1e-12, abs=1e-12 * lam * (abs(a) + abs(b)))


@given(st.integers(-20, 20), st.integers(2, 500), st.integers(1, 20))
@settings(max_examples=80, deadline=None)
def test_surd_convergent_invariants(P, D, Q):
    assume(math.isqrt(D) ** 2 != D)
    alpha = (P + math.sqrt(D)) / Q
    assume(alpha > 1.01)
    e = expand(Surd(P, D, Q), 25)
    conv = e.convergents
    for (p0, q0), (p1, q1) in zip(conv, conv[1:]):
        assert abs(p1 * q0 - p0 * q1) == 1
    assert all(r >= 1 for r in e.quotients[1:])
    # Exact floor of each complete quotient, checked at high precision.
    with mpmath.workdps(80):
        x = (P + mpmath.sqrt(D)) / Q
        for r in e.quotients[:10]:
            assert r == int(mpmath.floor(x))
            x = 1 / (x - r)


@given(st.fractions(min_value=Fraction(101, 100), max_value=Fraction(10**6), max_denominator=10**6))
@settings(max_examples=80, deadline=None)
def test_rational_expansion_terminates_exactly(x):
    e = expand(x, 200)
    assert e.terminated
    p, q = e.convergents[-1]
    assert Fraction(p, q) == x


def test_mixed_sum_is_symmetric():
    c = SumControls(prune_epsilon=1e-5)
    for f, g in [("circle", "parabola"), ("circle", "hyperbola"), ("parabola", "cycloid")]:
        fg = mixed_sum(get_curve(f), get_curve(g), c).value
        gf = mixed_sum(get_curve(g), get_curve(f), c).value
        assert fg == pytest.approx(gf, rel=1e-14)

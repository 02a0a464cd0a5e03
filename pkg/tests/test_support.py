import json
import math
from fractions import Fraction
from math import gcd

import mpmath
import numpy as np
import pytest

from sl2sum.errors import InvalidInputError
from sl2sum.support import (ASTROID, CIRCLE, CURVES, CYCLOID, CYCLOID_ARCTAN, HYPERBOLA,
                            PARABOLA, TRACTRIX, SampledCurve, curve_from_samples,
                            gamma_astroid, gamma_circle, gamma_cycloid, gamma_hyperbola,
                            gamma_parabola, gamma_sampled, gamma_tractrix, get_curve,
                            load_sampled_curve)

from conftest import nodes_to_depth


@pytest.mark.parametrize("fn, a, b, expected", [
    (gamma_circle, 3, 4, 5.0),
    (gamma_circle, 1, 0, 1.0),
    (gamma_circle, 1, 1, 1.4142135623730951),
    (gamma_parabola, 1, 0, 1.25),
    (gamma_parabola, 0, 1, 1.0),
    (gamma_parabola, 1, 1, 2.125),
    (gamma_hyperbola, 0, 1, -1.0),
    (gamma_hyperbola, 1, 0, -1.7320508075688772),
    (gamma_hyperbola, 1, 1, -2.8284271247461903),
    (gamma_cycloid, 1, 0, 0.0),
    (gamma_cycloid, 0, 1, 2.0),
    (gamma_cycloid, 1, 1, 3.5707963267948966),
    (gamma_tractrix, 1, 0, 0.0),
    (gamma_tractrix, 0, 1, 0.0),
    (gamma_tractrix, 1, 1, 0.34657359027997264),
    (gamma_astroid, 1, 0, 0.0),
    (gamma_astroid, 1, 1, 0.7071067811865476),
    (gamma_astroid, 3, 4, 2.4),
])
def test_gamma_examples(fn, a, b, expected):
    assert fn(a, b) == pytest.approx(expected, rel=1e-15, abs=1e-15)


def test_catalog():
    assert set(CURVES) == {"circle", "parabola", "hyperbola", "cycloid", "cycloid-arctan",
                           "tractrix", "astroid"}
    assert get_curve("circle") is CIRCLE
    with pytest.raises(InvalidInputError):
        get_curve("ellipse")
    assert CIRCLE.certified and PARABOLA.certified and HYPERBOLA.certified and CYCLOID.certified
    assert not ASTROID.certified and not TRACTRIX.certified


@pytest.mark.parametrize("name", sorted(CURVES))
def test_homogeneity(name):
    g = CURVES[name].gamma
    for a in range(51):
        for b in range(51):
            if gcd(a, b) != 1:
                continue
            base = g(a, b)
            for t in (2, 3, 5):
                assert g(t * a, t * b) == pytest.approx(t * base, rel=1e-14, abs=1e-300)


@pytest.mark.parametrize("curve", [CIRCLE, PARABOLA, HYPERBOLA, CYCLOID])
def test_term_sign_on_depth10(curve, depth10_nodes):
    arr = np.array(depth10_nodes, dtype=float).T
    f = curve.node_terms(*arr) * curve.orientation
    assert np.all(f >= 0)


def test_cycloid_terms_are_nonpositive(depth10_nodes):
    # The stated cycloid support puts the arch above its tangents.
    arr = np.array(depth10_nodes, dtype=float).T
    assert np.all(CYCLOID.node_terms(*arr) <= 0)
    assert CYCLOID.orientation == -1


def test_cycloid_dual_form():
    for a in range(1, 40):
        for b in range(1, 40):
            lhs = a * math.acos((a * a - b * b) / (a * a + b * b))
            rhs = a * math.pi - 2 * a * math.atan(a / b)
            assert lhs == pytest.approx(rhs, abs=1e-12)
    arr = np.array(nodes_to_depth(8), dtype=float).T
    a, b, c, d = arr
    with np.errstate(divide="ignore"):
        bracket = (a * np.arctan2(a, b) + c * np.arctan2(c, d)
                   - (a + c) * np.arctan2(a + c, b + d))
    arccos_term = CYCLOID.node_terms(*arr)
    assert np.max(np.abs(bracket - (-0.5) * arccos_term)) < 1e-12
    assert np.max(np.abs(CYCLOID_ARCTAN.node_terms(*arr) - arccos_term)) < 1e-12


def test_circle_stable_term_matches_naive():
    # Entries up to 1e3; the naive difference is taken at 50 digits since in
    # doubles it already loses several digits at this size.
    nodes = [t for t in nodes_to_depth(12) if max(t) <= 1000][::7]
    arr = np.array(nodes, dtype=float).T
    stable = CIRCLE.node_terms(*arr)
    with mpmath.workdps(50):
        h = lambda x, y: mpmath.sqrt(x * x + y * y)
        naive = [float(h(a, b) + h(c, d) - h(a + c, b + d)) for a, b, c, d in nodes]
    assert np.allclose(stable, naive, rtol=1e-12, atol=0)
    few = np.array([t for t in nodes if max(t) <= 4], dtype=float).T
    naive_dbl = (np.hypot(few[0], few[1]) + np.hypot(few[2], few[3])
                 - np.hypot(few[0] + few[2], few[1] + few[3]))
    assert np.allclose(CIRCLE.node_terms(*few), naive_dbl, rtol=1e-12, atol=0)


def _circle_term_mp(a, b, c, d):
    with mpmath.workdps(60):
        h = lambda x, y: mpmath.sqrt(mpmath.mpf(x) ** 2 + mpmath.mpf(y) ** 2)
        return h(a, b) + h(c, d) - h(a + c, b + d)


def test_circle_stable_term_large_entries():
    for a, b, c, d in [(10**6, 1, 10**6 - 1, 1), (1, 0, 10**7, 1), (987654, 123457, 8, 1)]:
        if a * d - b * c != 1:
            continue
        exact = float(_circle_term_mp(a, b, c, d))
        stable = CIRCLE.node_terms(*(np.array([x], dtype=float) for x in (a, b, c, d)))[0]
        assert stable == pytest.approx(exact, rel=1e-12)
    # The naive difference has lost every digit here.
    a, b, c, d = 1, 0, 10**9, 1
    naive = math.hypot(a, b) + math.hypot(c, d) - math.hypot(a + c, b + d)
    exact = float(_circle_term_mp(a, b, c, d))
    assert abs(naive - exact) / exact > 1e-3


def test_parabola_closed_form_exact_depth12():
    # Exact rational support values make this an identity check, not a float one.
    def g(a, b):
        return Fraction(a * a, 4 * (a + b)) + a + b

    for a, b, c, d in nodes_to_depth(12):
        exact = g(a, b) + g(c, d) - g(a + c, b + d)
        s, t = a + b, c + d
        assert exact == Fraction(1, 4 * s * t * (s + t))
    arr = np.array(nodes_to_depth(12), dtype=float).T
    s, t = arr[0] + arr[1], arr[2] + arr[3]
    assert np.allclose(PARABOLA.node_terms(*arr), 1 / (4 * s * t * (s + t)), rtol=1e-15, atol=0)


def test_parabola_term_examples():
    one = lambda *x: float(PARABOLA.node_terms(*(np.array([v], dtype=float) for v in x))[0])
    assert one(1, 0, 0, 1) == pytest.approx(0.125, rel=1e-15)
    assert one(2, 1, 1, 1) == pytest.approx(1 / 120, rel=1e-15)
    # Rows and columns matter: at (3,1,2,1) the row-sum form gives 1/180.
    assert one(3, 1, 2, 1) == pytest.approx(Fraction(1, 4 * 4 * 3 * 7), rel=1e-15)
    assert one(3, 1, 2, 1) != pytest.approx(1 / (4 * 5 * 2 * 7), rel=1e-6)


def test_tractrix_b_zero_limit():
    assert gamma_tractrix(5, 0) == 0.0
    assert gamma_tractrix(5, 1e-12) == pytest.approx(0.0, abs=1e-9)


def test_cycloid_clamp():
    # Huge directions push the arccos argument to +-1 up to rounding.
    assert math.isfinite(gamma_cycloid(10**8, 1))
    assert gamma_cycloid(0, 7) == 14.0


# Sampled curves.

def circle_samples(n=10_000):
    t = np.linspace(-0.2, math.pi / 2 + 0.2, n)
    return np.stack([np.cos(t), np.sin(t)], axis=1)


def parabola_samples(n=10_000):
    # y = 1 - (x - y)^2 with x - y = t.
    t = np.linspace(-0.5, 1.0, n)
    y = 1 - t * t
    return np.stack([t + y, y], axis=1)


def test_sampled_circle():
    sc = SampledCurve(circle_samples())
    assert gamma_sampled(sc, 3, 4) == pytest.approx(5.0, abs=1e-6)


def test_sampled_parabola():
    sc = SampledCurve(parabola_samples())
    assert gamma_sampled(sc, 1, 0) == pytest.approx(1.25, abs=1e-5)


def test_sampled_rejects_degenerate():
    with pytest.raises(InvalidInputError):
        SampledCurve(np.array([[0.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        SampledCurve(np.array([[0.0, 1.0], [1.0, 0.0], [np.nan, 0.0]]))
    with pytest.raises(InvalidInputError):
        gamma_sampled(SampledCurve(circle_samples(10)), 0, 0)


@pytest.mark.parametrize("curve", [CIRCLE, PARABOLA, HYPERBOLA, CYCLOID, ASTROID])
def test_sampled_consistency(curve):
    phi = np.linspace(0.0, math.pi / 2, 20_001)
    x, y = curve.tangency(np.cos(phi), np.sin(phi))
    pts = np.stack([x, y], axis=1)
    # Cycloid and astroid lie on the far side of their tangents: their
    # support value is the minimum of a*x + b*y, i.e. minus the max over -C.
    sign = 1.0 if curve in (CIRCLE, PARABOLA, HYPERBOLA) else -1.0
    sampled = curve_from_samples(sign * pts)
    for a in range(0, 8):
        for b in range(0, 8):
            if gcd(a, b) != 1:
                continue
            assert sign * sampled.gamma(a, b) == pytest.approx(curve.gamma(a, b),
                                                               abs=1e-5 * max(1, a + b))


def test_load_csv_and_json(tmp_path):
    pts = circle_samples(500)
    csv_path = tmp_path / "c.csv"
    csv_path.write_text("x,y\n" + "\n".join(f"{float(x)!r},{float(y)!r}" for x, y in pts))
    json_path = tmp_path / "c.json"
    json_path.write_text(json.dumps(pts.tolist()))
    for path in (csv_path, json_path):
        sc = load_sampled_curve(path)
        assert sc.points.shape == (500, 2)
        assert gamma_sampled(sc, 1, 1) == pytest.approx(math.sqrt(2), abs=1e-4)
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\nfoo,bar\n")
    with pytest.raises(InvalidInputError):
        load_sampled_curve(bad)
    bad_json = tmp_path / "bad.json"
    bad_json.write_text('{"x": 1}')
    with pytest.raises(InvalidInputError):
        load_sampled_curve(bad_json)

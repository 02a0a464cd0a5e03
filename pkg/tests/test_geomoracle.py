import math
from math import gcd

import numpy as np
import pytest

from sl2sum import geomoracle as go
from sl2sum.errors import (DegenerateGeometryError, ToleranceNotMetError,
                           UnsupportedOperationError)
from sl2sum.lattice import UnimodularPair, root
from sl2sum.support import (ASTROID, CIRCLE, CURVES, CYCLOID, HYPERBOLA, PARABOLA, TRACTRIX,
                            curve_from_samples)

from conftest import nodes_to_depth

HYPERBOLA_F2 = 0.5 * math.log(3) + 2 * math.sqrt(3) - 4


def test_triangle_area_examples():
    assert go.triangle_area(CIRCLE, root()) == pytest.approx(0.5 * (2 - math.sqrt(2)) ** 2,
                                                             rel=1e-12)
    assert go.triangle_area(PARABOLA, root()) == pytest.approx(1 / 128, rel=1e-12)


@pytest.mark.parametrize("curve", [CIRCLE, PARABOLA])
def test_term_is_sqrt_twice_triangle_area(curve):
    from sl2sum.series import term
    for t in nodes_to_depth(6):
        p = UnimodularPair(*t)
        f = term(curve, p)
        assert f * f == pytest.approx(2 * go.triangle_area(curve, p), rel=1e-6)


def test_region_area_examples():
    assert go.region_area(CIRCLE) == pytest.approx(1 - math.pi / 4, abs=1e-12)
    assert go.region_area(PARABOLA) == pytest.approx(1 / 96, abs=1e-12)
    assert go.region_area(HYPERBOLA) == pytest.approx(HYPERBOLA_F2 / 2, abs=1e-12)
    assert go.region_area(CYCLOID) == pytest.approx(math.pi / 2, abs=1e-12)
    assert go.region_area(ASTROID) == pytest.approx(3 * math.pi / 32, abs=1e-12)


def test_region_area_matches_cone_area():
    # The named integrands and the generic support-function integral agree.
    for curve in (CIRCLE, PARABOLA, HYPERBOLA, ASTROID):
        assert go.cone_area(curve, (1, 0), (0, 1)) == pytest.approx(go.region_area(curve),
                                                                     abs=1e-9)
    assert go.cone_area(CYCLOID, (1, 0), (0, 1)) == pytest.approx(math.pi / 2, abs=1e-9)


def test_tractrix_region_is_a_quarter_of_pi_over_two():
    # Loop between the tractrix arc and its axis tangents: pi/8, so F(2) = pi/4.
    assert go.region_area(TRACTRIX) == pytest.approx(math.pi / 8, abs=1e-9)


def test_tangent_lengths():
    assert go.tangent_lengths(CIRCLE) == pytest.approx(2.0, abs=1e-14)
    assert go.tangent_lengths(PARABOLA) == pytest.approx(0.5, abs=1e-14)
    assert go.tangent_lengths(ASTROID) == pytest.approx(-2.0, abs=1e-14)
    assert go.tangent_lengths(CYCLOID) == pytest.approx(-(math.pi + 2), abs=1e-12)
    assert go.tangent_lengths(TRACTRIX) == math.inf


def test_quadrature_convergence():
    for curve in (CIRCLE, PARABOLA, HYPERBOLA):
        tol = 1e-6
        prev = go.region_area(curve, go.QuadratureSpec(abs_tol=tol))
        for _ in range(4):
            tol /= 2
            cur = go.region_area(curve, go.QuadratureSpec(abs_tol=tol))
            assert abs(cur - prev) < 2 * tol
            prev = cur


def test_quadrature_failure_carries_estimate():
    spec = go.QuadratureSpec(abs_tol=1e-300, max_subdivisions=1)
    with pytest.raises(ToleranceNotMetError) as info:
        go.cone_area(HYPERBOLA, (1, 0), (0, 1), spec)
    assert info.value.estimate == pytest.approx(HYPERBOLA_F2 / 2, abs=1e-3)
    with pytest.raises(ValueError):
        go.QuadratureSpec(abs_tol=0)


def test_parallel_tangents_rejected():
    with pytest.raises(DegenerateGeometryError):
        go.corner(CIRCLE, (1, 0), (2, 0))


@pytest.mark.parametrize("name", ["circle", "parabola", "hyperbola", "astroid", "cycloid"])
def test_tangent_line_touches(name):
    curve = CURVES[name]
    for a in range(0, 21):
        for b in range(0, 21):
            if gcd(a, b) != 1:
                continue
            line = go.tangent_line(curve, a, b)
            x, y = line.tangency
            assert a * x + b * y == pytest.approx(line.gamma, abs=1e-10 * max(1, a + b))


@pytest.mark.parametrize("curve", [CIRCLE, PARABOLA, HYPERBOLA])
def test_support_tangency_duality(curve):
    phi = np.linspace(0, math.pi / 2, 200_001)
    x, y = curve.tangency(np.cos(phi), np.sin(phi))
    for a in range(0, 21):
        for b in range(0, 21):
            if gcd(a, b) != 1:
                continue
            vals = a * x + b * y
            g = curve.gamma(a, b)
            assert vals.max() <= g + 1e-10 * (a + b)  # curve stays in the half-plane
            assert vals.max() == pytest.approx(g, abs=1e-8)


def test_mixed_volume_oracle():
    area = go.mixed_volume_oracle(CIRCLE, CIRCLE)
    assert area == pytest.approx(1 - math.pi / 4, abs=1e-4)
    cp = go.mixed_volume_oracle(CIRCLE, PARABOLA)
    pc = go.mixed_volume_oracle(PARABOLA, CIRCLE)
    assert cp == pytest.approx(pc, abs=1e-10)
    with pytest.raises(UnsupportedOperationError):
        go.mixed_volume_oracle(CIRCLE, ASTROID)


def test_mixed_volume_is_bilinear_in_scaling():
    # MV(A, A) is the area of A, for each certified curve.
    for curve in (PARABOLA, HYPERBOLA):
        assert go.mixed_volume_oracle(curve, curve) == pytest.approx(go.region_area(curve),
                                                                     abs=1e-6)


def test_sampled_region_area():
    phi = np.linspace(0, math.pi / 2, 20_001)
    pts = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    curve = curve_from_samples(pts)
    assert go.region_area(curve) == pytest.approx(1 - math.pi / 4, abs=1e-7)


def test_batched_cone_integrals_match_quadrature():
    nodes = [UnimodularPair(*t) for t in nodes_to_depth(5)]
    a, b, c, d = (np.array(x, dtype=float) for x in zip(*(p.as_tuple() for p in nodes)))
    for curve in (CIRCLE, HYPERBOLA, CYCLOID, ASTROID):
        batch = go.cone_squares_batch(curve, a, b, c, d)
        lengths = go.cone_lengths_batch(curve, a, b, c, d)
        for k, p in enumerate(nodes[:20]):
            assert batch[k] == pytest.approx(2 * go.cone_area(curve, p.u, p.v), abs=1e-10)
            assert lengths[k] == pytest.approx(go.cone_tangent_lengths(curve, p.u, p.v),
                                               abs=1e-12)

"""Numerical geometry used to cross-check the series engine.

Everything here works from tangent lines, tangency points and quadrature and
never sums over the tree, so agreement with :mod:`sl2sum.series` is a genuine
second route.

For a cone of normals between ``u`` and ``v`` (``det(u, v) = 1``), let ``C`` be
the corner where the tangents with normals ``u`` and ``v`` meet and let
``h_C(phi) = gamma(n) - <C, n>`` be the support function seen from ``C``,
``n = (cos phi, sin phi)``.  The region enclosed by the two tangent segments
and the curve has area ``1/2 * int (h_C'^2 - h_C^2) dphi`` (Green's theorem;
the boundary terms vanish because ``h_C`` is zero at both ends).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DegenerateGeometryError, ToleranceNotMetError, UnsupportedOperationError
from .lattice import UnimodularPair
from .support import Convexity, Curve


@dataclass(frozen=True)
class TangentLine:
    a: float
    b: float
    gamma: float
    tangency: tuple[float, float]


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    max_subdivisions: int = 2**20

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")


DEFAULT_QUADRATURE = QuadratureSpec()


def tangent_line(curve: Curve, a, b) -> TangentLine:
    return TangentLine(a, b, curve.gamma(a, b), curve.tangency_point(a, b))


def _quad(func, lo, hi, spec: QuadratureSpec, points=None) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(func, lo, hi, epsabs=spec.abs_tol, epsrel=0.0,
                                  limit=spec.max_subdivisions, points=points)
    if not err <= spec.abs_tol:
        raise ToleranceNotMetError(
            f"quadrature error estimate {err:.3g} exceeds {spec.abs_tol:.3g}", val, err)
    return val


def _intersect(n1, g1, n2, g2):
    m = np.array([n1, n2], dtype=float)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) < 1e-14 * math.hypot(*n1) * math.hypot(*n2):
        raise DegenerateGeometryError(f"tangent lines with normals {n1}, {n2} are parallel")
    return np.linalg.solve(m, np.array([g1, g2], dtype=float))


def triangle_area(curve: Curve, p: UnimodularPair) -> float:
    """Area of the triangle cut out by the tangents with normals u, v, u+v."""
    u, v = p.u, p.v
    w = (p.a + p.c, p.b + p.d)
    g = [curve.gamma(*n) for n in (u, v, w)]
    x0 = _intersect(u, g[0], v, g[1])
    x1 = _intersect(u, g[0], w, g[2])
    x2 = _intersect(v, g[1], w, g[2])
    e1, e2 = x1 - x0, x2 - x0
    return 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])


def corner(curve: Curve, u, v) -> tuple[float, float]:
    """Intersection of the tangents with normals ``u`` and ``v``."""
    x = _intersect(u, curve.gamma(*u), v, curve.gamma(*v))
    return float(x[0]), float(x[1])


def _support_from(curve: Curve, cx: float, cy: float):
    """Integrand ``h_C'^2 - h_C^2`` as a function of the normal angle."""

    def integrand(phi):
        c, s = math.cos(phi), math.sin(phi)
        h = curve.gamma(c, s) - (cx * c + cy * s)
        tx, ty = curve.tangency_point(c, s)
        dh = -(tx - cx) * s + (ty - cy) * c
        return dh * dh - h * h

    return integrand


def cone_area(curve: Curve, u, v, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Signed area between the curve and the tangents with normals ``u``, ``v``."""
    if curve.tangency is None or curve.samples is not None:
        raise UnsupportedOperationError(f"curve {curve.name!r} has no analytic tangency")
    cx, cy = corner(curve, u, v)
    lo, hi = math.atan2(u[1], u[0]), math.atan2(v[1], v[0])
    try:
        return 0.5 * _quad(_support_from(curve, cx, cy), lo, hi, spec)
    except ToleranceNotMetError as exc:
        raise ToleranceNotMetError(str(exc), 0.5 * exc.estimate, 0.5 * exc.error) from None


def cone_tangent_lengths(curve: Curve, u, v) -> float:
    """Signed lattice lengths of the two tangent segments from the corner.

    With ``det(u, v) = 1`` the segment on the tangent with normal ``u`` has
    lattice length ``<C - T_u, v> = gamma(v) - <T_u, v>``.
    """
    tu = curve.tangency_point(*u)
    tv = curve.tangency_point(*v)
    lu = curve.gamma(*v) - (tu[0] * v[0] + tu[1] * v[1])
    lv = curve.gamma(*u) - (tv[0] * u[0] + tv[1] * u[1])
    return float(lu + lv)


def _polygon_area(xs, ys) -> float:
    return 0.5 * float(np.dot(xs, np.roll(ys, -1)) - np.dot(ys, np.roll(xs, -1)))


def _sampled_region_area(curve: Curve) -> float:
    pts = curve.samples.points
    i0 = int(np.argmax(pts[:, 0]))
    i1 = int(np.argmax(pts[:, 1]))
    cx, cy = pts[i0, 0], pts[i1, 1]
    arc = pts[min(i0, i1):max(i0, i1) + 1]
    if i0 > i1:
        arc = arc[::-1]
    # Loop: T0 -> C -> T1 -> back along the arc.
    xs = np.concatenate([[arc[0, 0], cx], arc[::-1, 0]])
    ys = np.concatenate([[arc[0, 1], cy], arc[::-1, 1]])
    return abs(_polygon_area(xs, ys))


def region_area(curve: Curve, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Area between the curve and its tangents with normals (1, 0) and (0, 1).

    Twice this value is the sum of squared node terms.
    """
    if curve.samples is not None:
        return _sampled_region_area(curve)
    name = curve.name
    if name == "circle":
        # Corner square minus the quarter disk, the disk traced by angle.
        return 1.0 - _quad(lambda t: math.sin(t) ** 2, 0.0, math.pi / 2, spec)
    if name == "parabola":
        # Arc x = y + sqrt(1 - y) from (5/4, 3/4) to (1, 1); corner (5/4, 1).
        return 5 / 4 * 1 / 4 - _quad(lambda y: y + math.sqrt(1.0 - y), 0.75, 1.0, spec)
    if name == "hyperbola":
        # Arc x = 2y + sqrt(y^2 - 1) for y in [-2/sqrt3, -1]; corner (-sqrt3, -1).
        s3 = math.sqrt(3.0)
        return -_quad(lambda y: 2 * y + math.sqrt(y * y - 1.0) + s3, -2 / s3, -1.0, spec)
    if name in ("cycloid", "cycloid-arctan"):
        # Arch (t - sin t, 3 + cos t), t in [0, pi]; corner (0, 2).
        return _quad(lambda t: (1 + math.cos(t)) * (1 - math.cos(t)), 0.0, math.pi, spec)
    if name == "astroid":
        return _quad(lambda x: (1.0 - x ** (2 / 3)) ** 1.5, 0.0, 1.0, spec)
    return cone_area(curve, (1, 0), (0, 1), spec)


def tangent_lengths(curve: Curve) -> float:
    """Signed total length of the tangents with normals (1, 0), (0, 1), measured
    from their intersection to the tangency points.

    Returns ``inf`` when a tangency point is at infinity (tractrix).
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        val = cone_tangent_lengths(curve, (1, 0), (0, 1))
    if not math.isfinite(val):
        return math.inf
    return val


def _arc_points(curve: Curve, n: int) -> np.ndarray:
    phi = np.linspace(0.0, math.pi / 2, n + 1)
    x, y = curve.tangency(np.cos(phi), np.sin(phi))
    return np.stack([np.broadcast_to(x, phi.shape), np.broadcast_to(y, phi.shape)], axis=1)


def _corner_region_area(points: np.ndarray, cx: float, cy: float) -> float:
    xs = np.concatenate([[points[0, 0], cx], points[::-1, 0]])
    ys = np.concatenate([[points[0, 1], cy], points[::-1, 1]])
    return _polygon_area(xs, ys)


def mixed_volume_oracle(curve_f: Curve, curve_g: Curve, samples: int = 2**14) -> float:
    """Mixed area of the two curvilinear triangles, by polarization.

    The curvilinear triangle of the Minkowski sum is built from the sum of the
    tangency points at common normals (the support of a Minkowski sum is the
    sum of the supports), so ``(A(f+g) - A(f) - A(g)) / 2`` needs no hull.
    """
    for c in (curve_f, curve_g):
        if c.convexity is Convexity.NON_CONVEX:
            raise UnsupportedOperationError(f"curve {c.name!r} is not convex")
        if c.tangency is None:
            raise UnsupportedOperationError(f"curve {c.name!r} has no tangency evaluator")
    pf = _arc_points(curve_f, samples)
    pg = _arc_points(curve_g, samples)
    cf = (curve_f.gamma(1, 0), curve_f.gamma(0, 1))
    cg = (curve_g.gamma(1, 0), curve_g.gamma(0, 1))
    af = _corner_region_area(pf, *cf)
    ag = _corner_region_area(pg, *cg)
    asum = _corner_region_area(pf + pg, cf[0] + cg[0], cf[1] + cg[1])
    return 0.5 * (asum - af - ag)


# Batched cone integrals for the summation engine.

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def cone_squares_batch(curve: Curve, a, b, c, d) -> np.ndarray:
    """``2 * cone_area`` for many cones at once, by 24-point Gauss-Legendre.

    Cones below tree nodes are narrow and the integrand is analytic there, so
    the fixed rule is accurate to rounding.
    """
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    gu, gv = curve.gamma(a, b), curve.gamma(c, d)
    # Corner from the unimodular system [u; v] C = (gu, gv).
    cx = d * gu - b * gv
    cy = -c * gu + a * gv
    lo, hi = np.arctan2(b, a), np.arctan2(d, c)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    phi = mid[:, None] + half[:, None] * _GL_X[None, :]
    cs, sn = np.cos(phi), np.sin(phi)
    h = curve.gamma(cs, sn) - (cx[:, None] * cs + cy[:, None] * sn)
    tx, ty = curve.tangency(cs, sn)
    dh = -(tx - cx[:, None]) * sn + (ty - cy[:, None]) * cs
    return half * ((dh * dh - h * h) @ _GL_W)


def cone_lengths_batch(curve: Curve, a, b, c, d) -> np.ndarray:
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    tux, tuy = curve.tangency(a, b)
    tvx, tvy = curve.tangency(c, d)
    return (curve.gamma(c, d) - (tux * c + tuy * d)) + (curve.gamma(a, b) - (tvx * a + tvy * b))

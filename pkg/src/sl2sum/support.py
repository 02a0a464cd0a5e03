"""Support values of convex curves.

For a direction ``(a, b)`` with nonnegative components the support value
``gamma(a, b)`` is the constant of the tangent line ``a*x + b*y = gamma``
that keeps the curve on its negative side.  All evaluators are positively
homogeneous of degree one and accept scalars or numpy arrays.

The built-in catalog covers the circle, a parabola, a hyperbola branch, a
cycloid arch, the tractrix-like envelope and the astroid.  Sampled curves
(finite point lists) are supported through :class:`SampledCurve`.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import InvalidInputError, Sl2SumError

ARCCOS_CLAMP_TOL = 1e-12


class Convexity(str, Enum):
    CERTIFIED = "convex-certified"
    NON_CONVEX = "non-convex"
    UNKNOWN = "unknown"


def _out(x):
    # 0-d results come back as Python floats.
    return float(x) if np.ndim(x) == 0 else x


def _f(x):
    return np.asarray(x, dtype=float)


def gamma_circle(a, b):
    return _out(np.hypot(_f(a), _f(b)))


def gamma_parabola(a, b):
    """Support of the parabola ``y = 1 - (x - y)**2``."""
    a, b = _f(a), _f(b)
    return _out(a * a / (4.0 * (a + b)) + a + b)


def gamma_hyperbola(a, b):
    """Support of the branch of ``y**2 - (x - 2y)**2 = 1`` below the origin.

    The radicand ``(2a+b)**2 - a**2`` is written as ``(a+b)(3a+b)``, which is
    nonnegative for nonnegative directions.
    """
    a, b = _f(a), _f(b)
    return _out(-np.sqrt((a + b) * (3.0 * a + b)))


def gamma_cycloid(a, b):
    """``a*arccos((a^2-b^2)/(a^2+b^2)) + 2b`` with the argument clamped to [-1, 1]."""
    a, b = _f(a), _f(b)
    r2 = a * a + b * b
    arg = (a * a - b * b) / r2
    if np.any(np.abs(arg) > 1.0 + ARCCOS_CLAMP_TOL):
        raise Sl2SumError("arccos argument outside [-1, 1] beyond rounding tolerance")
    return _out(a * np.arccos(np.clip(arg, -1.0, 1.0)) + 2.0 * b)


def gamma_cycloid_arctan(a, b):
    """The cycloid support rewritten with ``arctan(a/b)``; ``arctan(a/0) = pi/2``.

    Uses ``arccos((a^2-b^2)/(a^2+b^2)) = pi - 2*arctan(a/b) = 2*arctan(b/a)``;
    the last form avoids cancellation when ``b`` is small.
    """
    a, b = _f(a), _f(b)
    return _out(2.0 * a * np.arctan2(b, a) + 2.0 * b)


def gamma_tractrix(a, b):
    """``b*ln(sqrt(a^2+b^2)/b)``, extended by its limit 0 at ``b = 0``."""
    a, b = _f(a), _f(b)
    safe_b = np.where(b > 0, b, 1.0)
    # log1p keeps full precision when a << b.
    val = np.where(b > 0, 0.5 * safe_b * np.log1p((a / safe_b) ** 2), 0.0)
    return _out(val)


def gamma_astroid(a, b):
    a, b = _f(a), _f(b)
    return _out(a * b / np.hypot(a, b))


# Tangency points: the gradient of a homogeneous support function is the
# point where the tangent line with that normal touches the envelope.

def _tangency_circle(a, b):
    r = np.hypot(a, b)
    return a / r, b / r


def _tangency_parabola(a, b):
    s2 = 4.0 * (a + b) ** 2
    return a * (a + 2.0 * b) / s2 + 1.0, 1.0 - a * a / s2


def _tangency_hyperbola(a, b):
    root = np.sqrt((a + b) * (3.0 * a + b))
    return -(3.0 * a + 2.0 * b) / root, -(2.0 * a + b) / root


def _tangency_cycloid(a, b):
    r2 = a * a + b * b
    theta = 2.0 * np.arctan2(b, a)
    return theta - 2.0 * a * b / r2, 2.0 * a * a / r2 + 2.0


def _tangency_tractrix(a, b):
    r2 = a * a + b * b
    with np.errstate(divide="ignore"):
        y = np.log(np.sqrt(r2) / b) - a * a / r2
    return a * b / r2, y


def _tangency_astroid(a, b):
    r3 = np.hypot(a, b) ** 3
    return b**3 / r3, a**3 / r3


# Stable node terms.  Both use a*d - b*c = 1.

def _term_circle(a, b, c, d):
    ru = np.hypot(a, b)
    rv = np.hypot(c, d)
    rw = np.hypot(a + c, b + d)
    return 2.0 / ((ru * rv + a * c + b * d) * (ru + rv + rw))


def _term_parabola(a, b, c, d):
    # The support differences reduce to (a*d - b*c)^2 / (4 S T (S + T)).
    su = a + b
    sv = c + d
    return 1.0 / (4.0 * su * sv * (su + sv))


def _term_cycloid_arctan(a, b, c, d):
    # Equals the arccos-form term; the bracket is -1/2 of it.
    g = a * np.arctan2(a, b) + c * np.arctan2(c, d) - (a + c) * np.arctan2(a + c, b + d)
    return -2.0 * g


@dataclass(frozen=True)
class Curve:
    """A named support-function evaluator.

    ``orientation`` is +1 when the node terms are nonnegative and -1 when the
    support formula places the curve on the positive side of its tangents
    (terms nonpositive); it only matters for convex-certified curves.
    ``term`` optionally overrides the naive difference of support values with
    a cancellation-free rearrangement.  ``tangency`` maps directions to the
    touching point and is needed by the geometric oracle.
    """

    name: str
    gamma: Callable
    convexity: Convexity = Convexity.UNKNOWN
    orientation: int = 1
    term: Callable | None = None
    tangency: Callable | None = None
    samples: "SampledCurve | None" = field(default=None, compare=False, repr=False)

    @property
    def certified(self) -> bool:
        return self.convexity is Convexity.CERTIFIED

    def __call__(self, a, b):
        return self.gamma(a, b)

    def node_terms(self, a, b, c, d):
        """Vectorized node term for float arrays of entries."""
        if self.term is not None:
            return self.term(a, b, c, d)
        g = self.gamma
        return g(a, b) + g(c, d) - g(a + c, b + d)

    def tangency_point(self, a, b):
        if self.tangency is None:
            raise Sl2SumError(f"curve {self.name!r} has no tangency evaluator")
        x, y = self.tangency(_f(a), _f(b))
        return _out(x), _out(y)


CIRCLE = Curve("circle", gamma_circle, Convexity.CERTIFIED, 1, _term_circle, _tangency_circle)
PARABOLA = Curve("parabola", gamma_parabola, Convexity.CERTIFIED, 1, _term_parabola,
                 _tangency_parabola)
HYPERBOLA = Curve("hyperbola", gamma_hyperbola, Convexity.CERTIFIED, 1, None, _tangency_hyperbola)
CYCLOID = Curve("cycloid", gamma_cycloid, Convexity.CERTIFIED, -1, None, _tangency_cycloid)
CYCLOID_ARCTAN = Curve("cycloid-arctan", gamma_cycloid_arctan, Convexity.CERTIFIED, -1,
                       _term_cycloid_arctan, _tangency_cycloid)
TRACTRIX = Curve("tractrix", gamma_tractrix, Convexity.NON_CONVEX, 1, None, _tangency_tractrix)
ASTROID = Curve("astroid", gamma_astroid, Convexity.NON_CONVEX, 1, None, _tangency_astroid)

CURVES = {c.name: c for c in (CIRCLE, PARABOLA, HYPERBOLA, CYCLOID, CYCLOID_ARCTAN,
                              TRACTRIX, ASTROID)}


def get_curve(name: str) -> Curve:
    try:
        return CURVES[name]
    except KeyError:
        raise InvalidInputError(
            f"unknown curve {name!r}; choose from {', '.join(CURVES)}") from None


@dataclass(frozen=True)
class SampledCurve:
    """An ordered list of points tracing a curve arc."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidInputError("sampled curve needs an (n, 2) array of points")
        if len(pts) < 3:
            raise InvalidInputError("sampled curve needs at least 3 points")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("sampled curve has non-finite coordinates")
        object.__setattr__(self, "points", pts)


def _sampled_argmax(points, a, b):
    vals = points @ np.array([a, b], dtype=float)
    i = int(np.argmax(vals))
    return vals, i


def gamma_sampled(curve: SampledCurve, a, b) -> float:
    """Max of ``a*x + b*y`` over the samples, refined by a parabola through the
    best sample and its two neighbors."""
    if a == 0 and b == 0:
        raise InvalidInputError("direction (0, 0) has no support value")
    vals, i = _sampled_argmax(curve.points, a, b)
    best = vals[i]
    if 0 < i < len(vals) - 1:
        lo, hi = vals[i - 1], vals[i + 1]
        curv = 2.0 * best - lo - hi
        if curv > 0:
            best = best + (hi - lo) ** 2 / (8.0 * curv)
    return float(best)


def _sampled_gamma_vec(samples: SampledCurve):
    pts = samples.points

    def gamma(a, b):
        a_arr, b_arr = np.broadcast_arrays(_f(a), _f(b))
        flat_a, flat_b = a_arr.ravel(), b_arr.ravel()
        out = np.empty(flat_a.shape)
        n = len(pts)
        for lo in range(0, len(flat_a), 256):
            dirs = np.stack([flat_a[lo:lo + 256], flat_b[lo:lo + 256]], axis=1)
            vals = dirs @ pts.T
            idx = np.argmax(vals, axis=1)
            rows = np.arange(len(idx))
            best = vals[rows, idx]
            inner = (idx > 0) & (idx < n - 1)
            lo_v = vals[rows, np.clip(idx - 1, 0, n - 1)]
            hi_v = vals[rows, np.clip(idx + 1, 0, n - 1)]
            curv = 2.0 * best - lo_v - hi_v
            ok = inner & (curv > 0)
            best = np.where(ok, best + (hi_v - lo_v) ** 2 / (8.0 * np.where(ok, curv, 1.0)), best)
            out[lo:lo + 256] = best
        return _out(out.reshape(a_arr.shape))

    def tangency(a, b):
        a_arr, b_arr = np.broadcast_arrays(_f(a), _f(b))
        dirs = np.stack([a_arr.ravel(), b_arr.ravel()], axis=1)
        idx = np.argmax(dirs @ pts.T, axis=1)
        p = pts[idx]
        return p[:, 0].reshape(a_arr.shape), p[:, 1].reshape(a_arr.shape)

    return gamma, tangency


def curve_from_samples(points, name: str = "sampled") -> Curve:
    samples = points if isinstance(points, SampledCurve) else SampledCurve(points)
    gamma, tangency = _sampled_gamma_vec(samples)
    return Curve(name, gamma, Convexity.UNKNOWN, 1, None, tangency, samples)


def load_sampled_curve(path: str | Path) -> SampledCurve:
    """Read points from CSV (two columns, optional header) or JSON ([[x, y], ...])."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: {exc}") from exc
        if not isinstance(data, list) or not all(
                isinstance(row, (list, tuple)) and len(row) == 2 for row in data):
            raise InvalidInputError(f"{path}: expected an array of [x, y] pairs")
        return SampledCurve(np.array(data, dtype=float))
    rows = []
    for k, row in enumerate(csv.reader(text.splitlines())):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise InvalidInputError(f"{path}: line {k + 1} does not have two columns")
        try:
            rows.append((float(row[0]), float(row[1])))
        except ValueError:
            if k == 0 and not rows:
                continue  # header
            raise InvalidInputError(f"{path}: line {k + 1} is not numeric") from None
    return SampledCurve(np.array(rows, dtype=float))

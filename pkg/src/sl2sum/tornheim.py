"""Mordell-Tornheim sums over coprime pairs.

``T*(s) = sum over coprime b, d >= 1 of (b d (b + d))**-s``.

Grouping all pairs by ``g = gcd(b, d)`` gives ``T(s) = zeta(3s) T*(s)``, where
``T`` is the unrestricted double sum.  The zeta path evaluates ``T`` from the
integral representation

    T(s) = 1/Gamma(s) * int_0^inf t**(s-1) Li_s(exp(-t))**2 dt

and divides by ``zeta(3s)``.  The direct path sums a gcd-filtered grid and adds
an estimate of what lies outside it.

The quantity here is the unprefixed sum; the weighted series over the tree for
the parabola ``y = 1 - (x - y)**2`` is ``4**-s * T*(s)`` (see
:func:`parabola_weighted_sum`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import mpmath
import numpy as np
from scipy.special import roots_jacobi

from .errors import DomainError, InvalidInputError
from .series import SeriesResult, TailKind


class Mode(str, Enum):
    DIRECT = "direct"
    ZETA = "zeta"


@dataclass(frozen=True)
class TornheimQuery:
    s: float
    cutoff: int = 2000
    mode: Mode = Mode.ZETA

    def __post_init__(self):
        if not self.s > 2 / 3:
            raise DomainError(f"the series diverges for s <= 2/3 (got s={self.s})")
        if int(self.cutoff) != self.cutoff or self.cutoff < 2:
            raise InvalidInputError("cutoff must be an integer >= 2")
        object.__setattr__(self, "mode", Mode(self.mode))


# Riemann zeta for real x > 1: direct sum to N plus Euler-Maclaurin.

_ZETA_TERMS = 10_000


@lru_cache(maxsize=None)
def _bernoulli_even(count: int) -> tuple[Fraction, ...]:
    """B_2, B_4, ..., B_{2*count} from the standard recurrence."""
    n_max = 2 * count
    b = [Fraction(0)] * (n_max + 1)
    b[0] = Fraction(1)
    for m in range(1, n_max + 1):
        b[m] = -sum(math.comb(m + 1, k) * b[k] for k in range(m)) / (m + 1)
    return tuple(b[2 * j] for j in range(1, count + 1))


def zeta(x: float, terms: int = _ZETA_TERMS) -> float:
    """Riemann zeta at real ``x > 1``.

    The first ``terms - 1`` terms are summed directly; the rest come from
    Euler-Maclaurin with six Bernoulli corrections.
    """
    if not x > 1:
        raise DomainError("zeta is only provided for x > 1")
    n = terms
    k = np.arange(1, n, dtype=float)
    head = math.fsum(k**-x)
    tail = n ** (1 - x) / (x - 1) + 0.5 * n**-x
    # Derivatives of k**-x: rising factorial x (x+1) ... (x+2j-2) / n**(x+2j-1).
    rising = x
    for j, b2j in enumerate(_bernoulli_even(6), start=1):
        tail += float(b2j) / math.factorial(2 * j) * rising * n ** (-x - 2 * j + 1)
        rising *= (x + 2 * j - 1) * (x + 2 * j)
    return head + tail


def all_pairs_sum(s: float) -> float:
    """``sum over all b, d >= 1 of (b d (b + d))**-s`` by the polylog integral."""
    s_mp = mpmath.mpf(s)
    with mpmath.workdps(30):
        integrand = lambda t: t ** (s_mp - 1) * mpmath.polylog(s_mp, mpmath.exp(-t)) ** 2
        val = mpmath.quad(integrand, [0, 1, 5, 40, mpmath.inf]) / mpmath.gamma(s_mp)
    return float(val)


# Direct mode.

def _coprime_grid_sum(s: float, cutoff: int) -> float:
    idx = np.arange(1, cutoff + 1, dtype=np.int64)
    partials = []
    for b in range(1, cutoff + 1):
        d = idx[np.gcd(idx, b) == 1]
        partials.append(math.fsum((b * d.astype(float) * (b + d)) ** -s))
    return math.fsum(partials)


def _totient_upto(n: int) -> np.ndarray:
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


def _outside_estimate(s: float, cutoff: int) -> float:
    """Integral estimate of the pairs with ``max(b, d) > cutoff``.

    Rows ``b <= cutoff`` use the exact coprime density ``phi(b)/b`` along the
    row; the corner where both exceed the cutoff uses ``6/pi**2``.  Integrals
    start at ``cutoff + 1/2`` (midpoint correction) and are done by
    Gauss-Jacobi after ``y = X/t``, which leaves the weight ``t**(2s-2)``.
    """
    x0 = cutoff + 0.5
    nodes, weights = roots_jacobi(48, 0.0, 2 * s - 2)
    t = 0.5 * (nodes + 1.0)
    w = weights * 0.5 ** (2 * s - 1)

    b = np.arange(1, cutoff + 1, dtype=float)
    # int_X^inf (b y (b + y))**-s dy = X**(1-s) int_0^1 t**(2s-2) (b (b t + X))**-s dt
    rows = x0 ** (1 - s) * ((b[:, None] * (b[:, None] * t[None, :] + x0)) ** -s @ w)
    density = _totient_upto(cutoff)[1:] / b
    strips = 2.0 * math.fsum(density * rows)

    # int int_{[X, inf)^2} = X**(2-3s) int int (t1 t2)**(2s-2) (t1 + t2)**-s
    corner = x0 ** (2 - 3 * s) * float(w @ ((t[:, None] + t[None, :]) ** -s) @ w)
    return strips + 6 / math.pi**2 * corner


def tornheim_coprime(q: TornheimQuery) -> SeriesResult:
    """Coprime Mordell-Tornheim sum in the requested mode.

    Direct mode reports the outside-the-grid estimate as an estimated tail
    and includes it in the value.  The zeta path has no truncation; its
    ``tail_magnitude`` carries a conservative error level of the quadrature.
    """
    s = float(q.s)
    if q.mode is Mode.ZETA:
        value = all_pairs_sum(s) / zeta(3 * s)
        return SeriesResult(value, 0, 0, TailKind.ESTIMATED, 1e-14 * max(1.0, abs(value)),
                            extra={"mode": "zeta"})
    head = _coprime_grid_sum(s, q.cutoff)
    tail = _outside_estimate(s, q.cutoff)
    pairs = int(np.sum(_totient_upto(q.cutoff)[1:])) * 2 - 1
    return SeriesResult(head + tail, pairs, 0, TailKind.ESTIMATED, tail,
                        extra={"mode": "direct", "grid_sum": head})


def coprime_pairs_via_tree(cutoff: int) -> Iterator[tuple[int, int]]:
    """Coprime ``(b, d)`` with ``1 <= b, d <= cutoff``, each once, as tree mediants.

    The mediant of the root is (1, 1); a subtree is skipped as soon as its
    mediant leaves the box, since mediants only grow downward.
    """
    if cutoff < 1:
        raise InvalidInputError("cutoff must be >= 1")
    stack = [(1, 0, 0, 1)]
    while stack:
        a, b, c, d = stack.pop()
        m1, m2 = a + c, b + d
        if m1 > cutoff or m2 > cutoff:
            continue  # descendants' mediants dominate coordinatewise
        yield m1, m2
        stack.append((m1, m2, c, d))
        stack.append((a, b, m1, m2))


def parabola_weighted_sum(s: float = 1.0, mode: Mode | str = Mode.ZETA,
                          cutoff: int = 2000) -> SeriesResult:
    """``sum over tree nodes of (1/(4 S T (S + T)))**s`` with ``S = a + b``, ``T = c + d``.

    ``(S, T)`` is the mediant of the transposed node, so the nodes map one to
    one onto coprime pairs and the sum is ``4**-s`` times the coprime sum.
    """
    r = tornheim_coprime(TornheimQuery(s, cutoff, mode))
    scale = 4.0**-s
    return SeriesResult(scale * r.value, r.nodes_used, 0, r.tail_kind,
                        scale * r.tail_magnitude, extra=dict(r.extra))

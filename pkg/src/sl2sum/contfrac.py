"""Continued fractions and the two weighted series over convergents.

For ``alpha > 1`` with partial quotients ``r_1, r_2, ...`` and convergents
``(p_0, q_0) = (1, 0)``, ``(p_1, q_1) = (r_1, 1)``, ...::

    sum_k |p_k - alpha q_k| r_{k+1} = alpha + 1
    sum_k (p_k - alpha q_k)**2 r_{k+1} = alpha

Inputs are a decimal string (read as an exact rational with a finite number of
trusted digits), a named constant, or a quadratic surd ``(P + sqrt(D)) / Q``.
Surds are expanded with exact integer arithmetic, so they never run out of
precision.
"""

from __future__ import annotations

import decimal
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import DomainError, InvalidInputError

DEFAULT_DIGITS = 50
GUARD_DIGITS = 5
PRECISION_ENV = "SL2SUM_PRECISION"


def working_digits() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_DIGITS
    try:
        digits = int(raw)
    except ValueError as exc:
        raise InvalidInputError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from exc
    if digits < 10:
        raise InvalidInputError(f"{PRECISION_ENV} must be at least 10")
    return digits


@dataclass(frozen=True)
class Surd:
    """The quadratic irrational ``(P + sqrt(D)) / Q``."""

    P: int
    D: int
    Q: int

    def __post_init__(self):
        if self.Q == 0:
            raise InvalidInputError("surd denominator Q must be nonzero")
        if self.D < 0:
            raise InvalidInputError("surd radicand D must be nonnegative")

    def mpf(self, dps: int):
        with mpmath.workdps(dps):
            return (self.P + mpmath.sqrt(self.D)) / self.Q


@dataclass(frozen=True)
class CFExpansion:
    alpha: object  # mpmath.mpf at ``dps`` digits
    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    terminated: bool = False
    precision_exhausted: bool = False
    dps: int = DEFAULT_DIGITS
    source: str = ""
    exact: object = field(default=None, compare=False, repr=False)

    def residuals(self) -> list:
        """``p_k - alpha q_k`` for every convergent, at working precision."""
        if isinstance(self.exact, Fraction):
            return [Fraction(p) - self.exact * q for p, q in self.convergents]
        with mpmath.workdps(self.dps):
            return [p - self.alpha * q for p, q in self.convergents]


def _floor_surd(m: int, d: int, D: int) -> int:
    """Exact ``floor((m + sqrt(D)) / d)`` for ``d != 0``."""
    r = math.isqrt(D)
    k = (m + r) // d if d > 0 else -((-(m + r)) // -d)

    def at_most(k):  # k <= (m + sqrt D)/d
        t = k * d - m
        if d > 0:
            return t <= 0 or t * t <= D
        return t >= 0 and t * t >= D

    while not at_most(k):
        k -= 1
    while at_most(k + 1):
        k += 1
    return k


def _expand_surd(surd: Surd, n: int):
    P, D, Q = surd.P, surd.D, surd.Q
    if math.isqrt(D) ** 2 == D:
        return None  # rational, handled as a fraction
    # Normalize so that Q divides D - P^2, needed for integral recurrences.
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    m, d = P, Q
    quotients = []
    for _ in range(n):
        a = _floor_surd(m, d, D)
        quotients.append(a)
        m = a * d - m
        d = (D - m * m) // d
    return quotients


def _expand_fraction(x: Fraction, n: int, digits: int | None):
    """Quotients of a rational; stops when the trusted digits run out."""
    quotients: list[int] = []
    q_prev, q = 1, 0  # q_{-1}, q_0
    terminated = exhausted = False
    limit = None if digits is None else 10 ** max(digits - GUARD_DIGITS, 0)
    while len(quotients) < n:
        a = math.floor(x)
        q_prev, q = q, a * q + q_prev
        if limit is not None and q * q > limit:
            exhausted = True
            break
        quotients.append(a)
        frac = x - a
        if frac == 0:
            terminated = True
            break
        x = 1 / frac
    return quotients, terminated, exhausted


def _convergents(quotients):
    conv = [(1, 0)]
    p_prev, q_prev, p, q = 0, 1, 1, 0  # (p_{-1}, q_{-1}) = (0, 1)
    for r in quotients:
        p_prev, q_prev, p, q = p, q, r * p + p_prev, r * q + q_prev
        conv.append((p, q))
    return conv


NAMED = ("phi", "sqrt2", "pi", "e")


def _named(name: str, digits: int):
    if name == "phi":
        return Surd(1, 5, 2)
    if name == "sqrt2":
        return Surd(0, 2, 1)
    with mpmath.workdps(digits + 10):
        value = mpmath.pi if name == "pi" else mpmath.e
        return mpmath.nstr(+value, digits, strip_zeros=False)


def expand(alpha, n: int) -> CFExpansion:
    """First ``n`` partial quotients and the convergents of ``alpha``.

    ``alpha`` is a decimal string, one of ``phi``, ``sqrt2``, ``pi``, ``e``,
    a :class:`Surd` or a ``(P, D, Q)`` triple.  Decimal strings (and ``pi``,
    ``e``) are rounded to the working precision ``D`` and read as exact
    rationals.  Since ``|alpha - p_k/q_k| ~ 1/q_k**2``, the expansion stops
    with ``precision_exhausted`` once ``q_k**2 > 10**(D - 5)``; an exact
    rational that runs out of quotients first is flagged ``terminated``.
    """
    if n < 1:
        raise InvalidInputError("term count must be at least 1")
    digits = working_digits()
    source = str(alpha)
    if isinstance(alpha, str) and alpha.strip().lower() in NAMED:
        alpha = _named(alpha.strip().lower(), digits)
    if isinstance(alpha, tuple):
        alpha = Surd(*(int(x) for x in alpha))

    if isinstance(alpha, Surd):
        dps = max(digits, 60)
        value = alpha.mpf(dps)
        if value <= 1:
            raise DomainError(f"alpha must exceed 1, got {mpmath.nstr(value, 17)}")
        quotients = _expand_surd(alpha, n)
        if quotients is not None:
            return CFExpansion(value, tuple(quotients), tuple(_convergents(quotients)),
                               dps=dps, source=source, exact=alpha)
        exact, sig = Fraction(alpha.P + math.isqrt(alpha.D), alpha.Q), None
    elif isinstance(alpha, str):
        try:
            with decimal.localcontext() as ctx:
                ctx.prec = digits
                parsed = +decimal.Decimal(alpha.strip())
        except decimal.InvalidOperation as exc:
            raise InvalidInputError(f"cannot parse alpha {alpha!r}") from exc
        if not parsed.is_finite():
            raise InvalidInputError(f"alpha must be finite, got {alpha!r}")
        exact, sig = Fraction(parsed), digits
    elif isinstance(alpha, (int, Fraction)):
        exact, sig = Fraction(alpha), None
    else:
        raise InvalidInputError(f"unsupported alpha specification {alpha!r}")

    if exact <= 1:
        raise DomainError(f"alpha must exceed 1, got {float(exact)}")
    dps = digits + 10
    quotients, terminated, exhausted = _expand_fraction(exact, n, sig)
    with mpmath.workdps(dps):
        value = mpmath.mpf(exact.numerator) / exact.denominator
    return CFExpansion(value, tuple(quotients), tuple(_convergents(quotients)),
                       terminated=terminated, precision_exhausted=exhausted,
                       dps=dps, source=source, exact=exact)


def _weighted(e: CFExpansion, power: int) -> float:
    if len(e.convergents) < 2:
        raise InvalidInputError("need at least two convergents")
    res = e.residuals()
    weights = e.quotients  # r_{k+1} pairs with convergent k
    if isinstance(e.exact, Fraction):
        total = sum(abs(x) ** power * r for x, r in zip(res, weights))
        return float(total)
    with mpmath.workdps(e.dps):
        return float(mpmath.fsum(abs(x) ** power * r for x, r in zip(res, weights)))


def series_abs(e: CFExpansion) -> float:
    """``sum_{k=0}^{n-1} |p_k - alpha q_k| r_{k+1}``."""
    return _weighted(e, 1)


def series_sq(e: CFExpansion) -> float:
    """``sum_{k=0}^{n-1} (p_k - alpha q_k)**2 r_{k+1}``."""
    return _weighted(e, 2)

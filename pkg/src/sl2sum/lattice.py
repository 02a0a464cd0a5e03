"""The positive part of SL(2, Z) as a Stern-Brocot tree.

A node ``(a, b, c, d)`` is the matrix with rows ``u = (a, b)`` and
``v = (c, d)``; ``a*d - b*c == 1`` and all entries are nonnegative.  The root
is the identity.  The left child refines toward ``u``::

    (a, b, c, d) -> (a, b, a+c, b+d), (a+c, b+d, c, d)

Every nonnegative unimodular matrix is reached from the root by exactly one
path, and the mediants ``(a+c, b+d)`` run over all primitive vectors except
``(1, 0)`` and ``(0, 1)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterator

from .errors import ArithmeticOverflowError, DomainError, InvalidInputError

INT64_MAX = 2**63 - 1


def _checked_add(x: int, y: int) -> int:
    s = x + y
    if s > INT64_MAX:
        raise ArithmeticOverflowError(f"{x} + {y} exceeds the 64-bit range")
    return s


@dataclass(frozen=True, slots=True)
class UnimodularPair:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        entries = (self.a, self.b, self.c, self.d)
        if any(x < 0 for x in entries):
            raise InvalidInputError(f"negative entry in {entries}")
        if any(x > INT64_MAX for x in entries):
            raise ArithmeticOverflowError(f"entry of {entries} exceeds the 64-bit range")
        if self.a * self.d - self.b * self.c != 1:
            raise InvalidInputError(f"{entries} does not have determinant 1")

    @property
    def u(self) -> tuple[int, int]:
        return (self.a, self.b)

    @property
    def v(self) -> tuple[int, int]:
        return (self.c, self.d)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True, slots=True)
class PrimitiveVector:
    v1: int
    v2: int

    def __post_init__(self):
        if self.v1 < 0 or self.v2 < 0:
            raise InvalidInputError(f"({self.v1}, {self.v2}) has a negative component")
        if gcd(self.v1, self.v2) != 1:
            raise InvalidInputError(f"({self.v1}, {self.v2}) is not primitive")


def root() -> UnimodularPair:
    return UnimodularPair(1, 0, 0, 1)


def children(p: UnimodularPair) -> tuple[UnimodularPair, UnimodularPair]:
    """Left and right child of ``p``.

    Raises ArithmeticOverflowError if the mediant leaves the 64-bit range.
    """
    m1 = _checked_add(p.a, p.c)
    m2 = _checked_add(p.b, p.d)
    return UnimodularPair(p.a, p.b, m1, m2), UnimodularPair(m1, m2, p.c, p.d)


def mediant(p: UnimodularPair) -> PrimitiveVector:
    return PrimitiveVector(_checked_add(p.a, p.c), _checked_add(p.b, p.d))


def _cross(x1: int, x2: int, y1: int, y2: int) -> int:
    return x1 * y2 - x2 * y1


def locate(v: PrimitiveVector | tuple[int, int]) -> UnimodularPair:
    """The unique node whose mediant is ``v``.

    Descends with run-length steps (one per partial quotient of v1/v2), so the
    cost is logarithmic in ``max(v1, v2)``.
    """
    if not isinstance(v, PrimitiveVector):
        v = PrimitiveVector(*v)
    t1, t2 = v.v1, v.v2
    if (t1, t2) in ((1, 0), (0, 1)):
        raise DomainError(f"({t1}, {t2}) is a boundary vector and has no node")
    a, b, c, d = 1, 0, 0, 1
    while True:
        m1, m2 = a + c, b + d
        side = _cross(t1, t2, m1, m2)
        if side == 0:
            return UnimodularPair(a, b, c, d)
        if side > 0:
            # t lies between u and the mediant: repeat left moves v <- u + v.
            big = _cross(t1, t2, c, d)   # > 0
            small = -_cross(t1, t2, a, b)  # > 0
            k = max(1, (big - 1) // small)
            c, d = c + k * a, d + k * b
        else:
            big = -_cross(t1, t2, a, b)
            small = _cross(t1, t2, c, d)
            k = max(1, (big - 1) // small)
            a, b = a + k * c, b + k * d


class TreeWalk:
    """Iterator over distinct tree nodes starting at the root.

    ``order`` is ``"depth"`` (explicit stack, left subtree first) or
    ``"breadth"`` (level by level).  ``prune(node, depth)`` returning True
    skips the node together with its subtree.  Nodes whose children would
    overflow 64 bits are yielded but not expanded; ``overflow_truncations``
    counts them.
    """

    def __init__(
        self,
        order: str = "depth",
        budget: int | None = None,
        prune: Callable[[UnimodularPair, int], bool] | None = None,
        start: UnimodularPair | None = None,
        max_depth: int | None = None,
    ):
        if order not in ("depth", "breadth"):
            raise InvalidInputError(f"unknown traversal order {order!r}")
        if budget is not None and budget < 1:
            raise InvalidInputError("budget must be at least 1")
        self.order = order
        self.budget = budget
        self.prune = prune
        self.start = start if start is not None else root()
        self.max_depth = max_depth
        self.overflow_truncations = 0
        self.yielded = 0

    def __iter__(self) -> Iterator[UnimodularPair]:
        return self._walk()

    def _walk(self) -> Iterator[UnimodularPair]:
        pending = deque([(self.start, 0)])
        pop = pending.pop if self.order == "depth" else pending.popleft
        while pending:
            if self.budget is not None and self.yielded >= self.budget:
                return
            node, depth = pop()
            if self.prune is not None and self.prune(node, depth):
                continue
            self.yielded += 1
            yield node
            if self.max_depth is not None and depth >= self.max_depth:
                continue
            try:
                left, right = children(node)
            except ArithmeticOverflowError:
                self.overflow_truncations += 1
                continue
            if self.order == "depth":
                pending.append((right, depth + 1))
                pending.append((left, depth + 1))
            else:
                pending.append((left, depth + 1))
                pending.append((right, depth + 1))


def enumerate_tree(order: str = "depth", budget: int | None = None, **kwargs) -> TreeWalk:
    """Stream of tree nodes; see :class:`TreeWalk`."""
    return TreeWalk(order=order, budget=budget, **kwargs)


def depth_of(p: UnimodularPair) -> int:
    """Number of moves from the root to ``p``.

    Equals the sum of the partial quotients of ``(a+c)/(b+d)`` minus one.
    """
    x, y = p.a + p.c, p.b + p.d
    total = 0
    while y:
        q, r = divmod(x, y)
        total += q
        x, y = y, r
    return total - 1

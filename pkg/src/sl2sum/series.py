"""Sums of node terms over the positive part of SL(2, Z).

The node term of a curve is ``gamma(u) + gamma(v) - gamma(u + v)``; the power
sum ``F(s)`` adds ``term**s`` over every node.  The walk is vectorized: nodes
travel in int64 blocks, a whole block is evaluated with numpy, and children of
the surviving rows are pushed back on a stack.

Pruning drops a node and its whole subtree once ``|term| < prune_epsilon``.
For convex curves the tangent triangles below a node are nested inside its
own, so the terms only shrink further down and the dropped remainder is known
exactly from geometry (twice the cone area for ``s = 2``, the lattice lengths
of the two tangent segments for ``s = 1``).  Those remainders are summed into
``tail_magnitude`` and the result is reported as certified.  For other curves
the tail is the sum of ``|term|**s`` over the dropped nodes, a rough estimate.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from . import geomoracle
from .errors import DomainError, InvalidInputError, UnsupportedOperationError
from .lattice import INT64_MAX, UnimodularPair
from .support import CYCLOID_ARCTAN, Curve

CHUNK = 1 << 16


class TailKind(str, Enum):
    CERTIFIED = "certified"
    ESTIMATED = "estimated"
    NONE = "none"


class Accumulation(str, Enum):
    COMPENSATED = "compensated"
    PLAIN = "plain"


@dataclass(frozen=True)
class SumControls:
    s: float = 2.0
    prune_epsilon: float = 1e-9
    depth_cap: int = 1_000_000
    node_budget: int = 10**8
    accumulation: Accumulation = Accumulation.COMPENSATED

    def __post_init__(self):
        if not self.s > 0:
            raise InvalidInputError("exponent s must be positive")
        if not self.prune_epsilon >= 0:
            raise InvalidInputError("prune_epsilon must be nonnegative")
        if self.depth_cap < 0:
            raise InvalidInputError("depth_cap must be nonnegative")
        if self.node_budget < 1:
            raise InvalidInputError("node_budget must be at least 1")
        object.__setattr__(self, "accumulation", Accumulation(self.accumulation))


@dataclass(frozen=True)
class SeriesResult:
    value: float
    nodes_used: int
    truncated_subtrees: int
    tail_kind: TailKind
    tail_magnitude: float
    overflow_truncations: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "nodes_used": self.nodes_used,
            "truncated_subtrees": self.truncated_subtrees,
            "tail_kind": self.tail_kind.value,
            "tail_magnitude": self.tail_magnitude,
            "overflow_truncations": self.overflow_truncations,
        }


def _is_integer(s: float) -> bool:
    return float(s).is_integer()


def _power(f: np.ndarray, s: float) -> np.ndarray:
    if _is_integer(s):
        return f ** int(s)
    if np.any(f < 0):
        raise DomainError(f"negative node term under non-integer exponent s={s}")
    return f**s


def term(curve: Curve, p: UnimodularPair) -> float:
    """``gamma(a,b) + gamma(c,d) - gamma(a+c,b+d)`` for a single node."""
    a, b, c, d = (np.array([x], dtype=float) for x in p.as_tuple())
    return float(curve.node_terms(a, b, c, d)[0])


# Tail of a whole subtree, vectorized over its root nodes.

def _circle_tail(s: int):
    def tail(a, b, c, d):
        ru, rv = np.hypot(a, b), np.hypot(c, d)
        dot = a * c + b * d
        if s == 1:
            return (1.0 / ru + 1.0 / rv) / (ru * rv + dot)
        x = 0.5 * np.arctan2(1.0, dot)
        x2 = x * x
        series = x * x2 * (1 / 3 + x2 * (2 / 15 + x2 * (17 / 315 + x2 * 62 / 2835)))
        return 2.0 * np.where(x < 1e-2, series, np.tan(x) - x)
    return tail


def _parabola_tail(s: int):
    def tail(a, b, c, d):
        su, sv = a + b, c + d
        if s == 1:
            return (su + sv) / (4.0 * su * su * sv * sv)
        return 1.0 / (48.0 * (su * sv) ** 3)
    return tail


def _generic_tail(curve: Curve, s: int):
    def tail(a, b, c, d):
        with np.errstate(all="ignore"):
            if s == 1:
                return np.abs(geomoracle.cone_lengths_batch(curve, a, b, c, d))
            return np.abs(geomoracle.cone_squares_batch(curve, a, b, c, d))
    return tail


def _tail_function(curve: Curve, s: float):
    if not curve.certified or s not in (1, 2):
        return None
    s = int(s)
    if curve.name == "circle":
        return _circle_tail(s)
    if curve.name == "parabola":
        return _parabola_tail(s)
    if curve.tangency is None:
        return None
    return _generic_tail(curve, s)


@dataclass
class _Kernel:
    # (a, b, c, d) float arrays -> (prune magnitude, summand, |summand| estimate)
    evaluate: Callable
    tail: Callable | None


def _floats(block):
    return tuple(block[:, k].astype(float) for k in range(4))


def _children(block, seed_depth: int = 0):
    """Left and right children of every row.

    Column 5 tags the subtree: rows above ``seed_depth`` hold ``-1 - position``
    within their level and rows at or below it hold the index of their
    ancestor at ``seed_depth``.
    """
    left = block.copy()
    left[:, 2] += block[:, 0]
    left[:, 3] += block[:, 1]
    left[:, 4] += 1
    right = block.copy()
    right[:, 0] += block[:, 2]
    right[:, 1] += block[:, 3]
    right[:, 4] += 1
    if seed_depth and block.shape[1] > 5:
        head = block[:, 5] < 0
        if head.any():
            pos = -1 - block[head, 5]
            below = block[head, 4] + 1 >= seed_depth
            left[head, 5] = np.where(below, 2 * pos, -1 - 2 * pos)
            right[head, 5] = np.where(below, 2 * pos + 1, -2 - 2 * pos)
    return left, right


def _child_floats(block):
    a, b, c, d = _floats(block)
    return (a, b, a + c, b + d), (a + c, b + d, c, d)


def _root_row(seed_depth: int) -> np.ndarray:
    return np.array([[1, 0, 0, 1, 0, -1 if seed_depth else 0]], dtype=np.int64)


class _Accumulator:
    """Per-subtree partial sums, merged in subtree order.

    Subtree -1 is the head above the split depth and is merged first.
    """

    def __init__(self, compensated: bool):
        self.compensated = compensated
        self.partials: dict[int, list] = {}
        self.plain: dict[int, float] = {}

    def add(self, values: np.ndarray, tasks: np.ndarray):
        if not len(values):
            return
        if tasks[0] == tasks[-1] and np.all(tasks == tasks[0]):
            keys, segments = [int(tasks[0])], [values]
        else:
            order = np.argsort(tasks, kind="stable")
            ts, vs = tasks[order], values[order]
            cuts = np.flatnonzero(np.diff(ts)) + 1
            keys = [int(k) for k in ts[np.concatenate([[0], cuts])]]
            segments = np.split(vs, cuts)
        for k, seg in zip(keys, segments):
            if self.compensated:
                self.partials.setdefault(k, []).append(math.fsum(seg))
            else:
                self.plain[k] = self.plain.get(k, 0.0) + float(np.sum(seg))

    def total(self) -> float:
        if self.compensated:
            return math.fsum(math.fsum(self.partials[k]) for k in sorted(self.partials))
        out = 0.0
        for k in sorted(self.plain):
            out += self.plain[k]
        return out


def _evaluate(kernel: _Kernel, cols, pool, threads: int):
    n = len(cols[0])
    if pool is None or n < 4 * 4096:
        return kernel.evaluate(*cols)
    bounds = np.linspace(0, n, threads + 1).astype(int)
    parts = list(pool.map(lambda k: kernel.evaluate(*(x[bounds[k]:bounds[k + 1]] for x in cols)),
                          range(threads)))
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(3))


def _run(kernel: _Kernel, controls: SumControls, *, certified: bool, threads: int = 1,
         seed_depth: int = 0, on_block=None) -> SeriesResult:
    """Walk the tree, summing the kernel's summands.

    The blocks evaluated, and therefore every rounding step, depend only on
    ``controls`` and ``seed_depth``; ``threads`` only splits block evaluation.
    """
    eps = controls.prune_epsilon
    budget = controls.node_budget
    acc = _Accumulator(controls.accumulation is Accumulation.COMPENSATED)
    tails: list[float] = []
    nodes = evaluated = truncated = overflow_count = 0
    exhausted = False
    running = 0.0
    stack = [_root_row(seed_depth)]
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while stack:
            blk = stack.pop()
            while stack and len(blk) < CHUNK:
                blk = np.concatenate([blk, stack.pop()])
            if len(blk) > CHUNK:
                stack.append(blk[CHUNK:])
                blk = blk[:CHUNK]
            room = budget - evaluated
            if room <= 0:
                exhausted = True
                break
            if len(blk) > room:
                exhausted = True
                blk = blk[:room]
                stack.clear()
            evaluated += len(blk)

            cols = _floats(blk)
            mag, summand, est = _evaluate(kernel, cols, pool, threads)
            pruned = mag < eps
            kept = ~pruned
            acc.add(summand[kept], np.maximum(blk[kept, 5], -1))
            nodes += int(kept.sum())

            n_pruned = int(pruned.sum())
            if n_pruned:
                truncated += n_pruned
                if kernel.tail is not None:
                    tails.append(math.fsum(kernel.tail(*(x[pruned] for x in cols))))
                else:
                    tails.append(math.fsum(est[pruned]))

            live = blk[kept]
            capped = live[:, 4] >= controls.depth_cap
            overflow = ((live[:, 0] > INT64_MAX - live[:, 2])
                        | (live[:, 1] > INT64_MAX - live[:, 3]))
            stop = capped | overflow
            if stop.any():
                dead = live[stop]
                truncated += 2 * len(dead)
                overflow_count += int((overflow & ~capped).sum())
                if kernel.tail is not None:
                    for fl in _child_floats(dead):
                        tails.append(math.fsum(kernel.tail(*fl)))
                else:
                    tails.append(2.0 * math.fsum(est[kept][stop]))
                live = live[~stop]
            if len(live):
                left, right = _children(live, seed_depth)
                stack.append(right)
                stack.append(left)
            if on_block is not None:
                running += math.fsum(summand[kept])
                on_block(nodes, running)
    finally:
        if pool is not None:
            pool.shutdown()

    tail = math.fsum(tails)
    if exhausted:
        kind, tail = TailKind.NONE, math.inf
    elif certified:
        kind = TailKind.CERTIFIED
    else:
        kind = TailKind.ESTIMATED
    return SeriesResult(
        value=acc.total(),
        nodes_used=nodes,
        truncated_subtrees=truncated,
        tail_kind=kind,
        tail_magnitude=abs(tail),
        overflow_truncations=overflow_count,
        extra={"evaluated": evaluated},
    )


def _default_threads(threads):
    return threads if threads is not None else 1


def sum_power(curve: Curve, controls: SumControls, *, threads: int | None = None,
              seed_depth: int = 0, on_block=None) -> SeriesResult:
    """``F(s)``: the sum of ``term**s`` over all non-pruned nodes.

    ``seed_depth`` cuts the tree into ``2**seed_depth`` subtrees that keep
    private compensated accumulators, merged in subtree order.  ``threads``
    splits the evaluation of each block across workers and never changes
    which nodes share a block, so the value is bit-identical for any thread
    count.  ``on_block`` receives ``(nodes_used, running_value)`` after each
    evaluated block.
    """
    s = controls.s
    tail = _tail_function(curve, s)

    def evaluate(a, b, c, d):
        f = curve.node_terms(a, b, c, d)
        mag = np.abs(f)
        return mag, _power(f, s), mag**s

    kernel = _Kernel(evaluate, tail)
    return _run(kernel, controls, certified=tail is not None,
                threads=_default_threads(threads), seed_depth=seed_depth, on_block=on_block)


def sum_cycloid_arctan(controls: SumControls, **kwargs) -> SeriesResult:
    """``4 * sum (a*atan(a/b) + c*atan(c/d) - (a+c)*atan((a+c)/(b+d)))**2``.

    The exponent in ``controls`` is ignored; the sum is always of squares.
    """
    if controls.s != 2:
        controls = SumControls(2.0, controls.prune_epsilon, controls.depth_cap,
                               controls.node_budget, controls.accumulation)
    return sum_power(CYCLOID_ARCTAN, controls, **kwargs)


def _cauchy_schwarz_tail(tf, tg):
    def tail(a, b, c, d):
        return 0.5 * np.sqrt(tf(a, b, c, d) * tg(a, b, c, d))
    return tail


def mixed_sum(curve_f: Curve, curve_g: Curve, controls: SumControls, *,
              threads: int | None = None, seed_depth: int = 0) -> SeriesResult:
    """``1/2 * sum term_f * term_g``.

    A node is pruned when both terms are below ``prune_epsilon``.  When both
    curves are certified the remainder of a dropped subtree is bounded by
    Cauchy-Schwarz from the two squared-term remainders.
    """
    tf, tg = _tail_function(curve_f, 2), _tail_function(curve_g, 2)
    tail = None if tf is None or tg is None else _cauchy_schwarz_tail(tf, tg)

    def evaluate(a, b, c, d):
        f = curve_f.node_terms(a, b, c, d)
        g = curve_g.node_terms(a, b, c, d)
        prod = 0.5 * f * g
        return np.maximum(np.abs(f), np.abs(g)), prod, np.abs(prod)

    return _run(_Kernel(evaluate, tail), controls, certified=tail is not None,
                threads=_default_threads(threads), seed_depth=seed_depth)


def subtree_tail_bound(curve: Curve, p: UnimodularPair, s: int,
                       spec: geomoracle.QuadratureSpec = geomoracle.DEFAULT_QUADRATURE) -> float:
    """Sum of ``|term|**s`` over the whole subtree rooted at ``p`` (p included),
    from the tangent cone between ``u`` and ``v``."""
    if not curve.certified:
        raise UnsupportedOperationError(f"curve {curve.name!r} is not convex-certified")
    if s not in (1, 2):
        raise UnsupportedOperationError("tail bounds exist for s = 1 and s = 2 only")
    if s == 2:
        return abs(2.0 * geomoracle.cone_area(curve, p.u, p.v, spec))
    return abs(geomoracle.cone_tangent_lengths(curve, p.u, p.v))


def available_threads() -> int:
    return os.cpu_count() or 1

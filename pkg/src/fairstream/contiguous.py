"""Contiguous allocators: blocks of the item line, cut points only move right
where the analysis allows it.

Identical valuations throughout except ``offline_propa_splitter``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Callable, Sequence

from .core import ContiguousAllocation, IntervalValuationOracle, UnsupportedInstance, ValuationProfile
from .fairness import Order, SortedValueTuple, compare_leximin2

logger = logging.getLogger(__name__)


def _prefix_sums(values: Sequence[int]) -> list[int]:
    return [0, *accumulate(values)]


def _identical_value(item_values: tuple[int, ...]) -> int:
    if len(set(item_values)) > 1:
        raise UnsupportedInstance("this allocator needs identical valuations")
    return item_values[0]


class PropaPointer:
    """Online PROPa for identical additive goods with monotone cut pointers.

    Each round the threshold B_t = (v(M_t) - (n-1) v_max(M_t)) / n is
    recomputed and every pointer p_i advances until block i is worth at least
    B_t (compared as n * v(block) >= v(M_t) - (n-1) v_max).
    """

    def __init__(self, n: int):
        self.n = n
        self.t = 0
        self.cuts = [0] * (n - 1)
        self.total = 0
        self.vmax = 0
        self._prefix = [0]

    def threshold(self) -> int:
        """n * B_t."""
        return self.total - (self.n - 1) * self.vmax

    def step(self, item_values: tuple[int, ...]) -> ContiguousAllocation:
        v = _identical_value(item_values)
        if v < 0:
            raise UnsupportedInstance("propa-pointer handles goods only")
        self.t += 1
        self.total += v
        self.vmax = max(self.vmax, v)
        self._prefix.append(self._prefix[-1] + v)
        nB = self.threshold()
        prev = 0
        for i in range(self.n - 1):
            p = max(self.cuts[i], prev)
            while self.n * (self._prefix[p] - self._prefix[prev]) < nB:
                p += 1
                if p > self.t:
                    raise RuntimeError(f"round {self.t}: pointer {i + 1} ran past the last item")
            self.cuts[i] = prev = p
        return ContiguousAllocation(tuple(self.cuts), self.t)


def lumpy_tie_cut(oracle: Callable[[int, int], int], t: int) -> int:
    """Cut h(t) for two agents: agent 1 takes M_{h(t)}.

    i is the smallest j >= 1 with v(M_j) >= v(M_{j,t}); the lumpy item g_i
    joins whichever side is worth less.
    """
    if t == 0:
        return 0
    i = next(j for j in range(1, t + 1) if oracle(0, j) >= oracle(j, t))
    return i if oracle(0, i - 1) <= oracle(i, t) else i - 1


class LumpyTie:
    """Two agents, identical monotone valuations given as an interval oracle.

    Without an oracle the stream is valued additively.
    """

    def __init__(self, n: int = 2, oracle: IntervalValuationOracle | None = None):
        if n != 2:
            raise UnsupportedInstance("lumpy-tie is defined for exactly two agents")
        self.n = 2
        self.t = 0
        self._oracle = oracle
        self._values: list[int] = []

    def step(self, item_values: tuple[int, ...]) -> ContiguousAllocation:
        self.t += 1
        if self._oracle is None:
            self._values.append(_identical_value(item_values))
            oracle = IntervalValuationOracle.additive(self._values)
        else:
            oracle = self._oracle
        return ContiguousAllocation((lumpy_tie_cut(oracle, self.t),), self.t)


@dataclass
class LeximinDpTables:
    f: list[list[tuple[int, ...]]]
    h: list[list[tuple[int, ...]]]


def leximin2_dp(values: Sequence[int], n: int) -> tuple[ContiguousAllocation, LeximinDpTables]:
    """Contiguous leximin^2 allocation of an identical additive line.

    A[i][j] is the best of A[i-1][k] + (M_{k,j}) over 0 <= k <= j; only the
    cut tuple f and the sorted block values h are stored.
    """
    m = len(values)
    S = _prefix_sums(values)
    f: list[list[tuple[int, ...]]] = [[(j,) for j in range(m + 1)]]
    h: list[list[tuple[int, ...]]] = [[(S[j],) for j in range(m + 1)]]
    for _ in range(2, n + 1):
        f_prev, h_prev = f[-1], h[-1]
        f_row, h_row = [], []
        for j in range(m + 1):
            best = None
            for k in range(j + 1):
                cand = SortedValueTuple(h_prev[k], f_prev[k]).extend(S[j] - S[k], j)
                if best is None or compare_leximin2(cand, best) is Order.BETTER:
                    best = cand
            f_row.append(best.p)
            h_row.append(best.q)
        f.append(f_row)
        h.append(h_row)
    return ContiguousAllocation(f[n - 1][m][:-1], m), LeximinDpTables(f, h)


@dataclass
class Ef1Repair:
    """Trace of the offline EF1 repair of a leximin^2 allocation."""

    initial: ContiguousAllocation
    final: ContiguousAllocation
    fixed_agent: int
    snapshots: list[tuple[int, ...]] = field(default_factory=list)  # cut tuple after every move


def _envies_up_to_one(S: list[int], values: Sequence[int], bounds: list[int], i: int, j: int) -> bool:
    """Agent i envies block j even after dropping j's most valuable item."""
    lj, rj = bounds[j - 1], bounds[j]
    if lj >= rj:
        return False
    vi = S[bounds[i]] - S[bounds[i - 1]]
    return vi < S[rj] - S[lj] - max(values[lj:rj])


def offline_ef1_trace(values: Sequence[int], n: int) -> Ef1Repair:
    if any(x < 0 for x in values):
        raise UnsupportedInstance("offline EF1 handles goods only")
    initial, _ = leximin2_dp(values, n)
    S = _prefix_sums(values)
    bounds = list(initial.points)
    block_values = [S[bounds[b]] - S[bounds[b - 1]] for b in range(1, n + 1)]
    i = min(range(1, n + 1), key=lambda b: (block_values[b - 1], b))
    trace = Ef1Repair(initial, initial, i)
    for j in range(1, i):
        while _envies_up_to_one(S, values, bounds, i, j):
            bounds[j] -= 1  # rightmost item of A_j joins A_{j+1}
            trace.snapshots.append(tuple(bounds[1:-1]))
    for j in range(n, i, -1):
        while _envies_up_to_one(S, values, bounds, i, j):
            bounds[j - 1] += 1  # leftmost item of A_j joins A_{j-1}
            trace.snapshots.append(tuple(bounds[1:-1]))
    trace.final = ContiguousAllocation(tuple(bounds[1:-1]), len(values))
    return trace


def offline_ef1(values: Sequence[int], n: int) -> ContiguousAllocation:
    """EF1 contiguous allocation for identical additive goods.

    >>> offline_ef1([1, 3, 2], 2).cuts
    (2,)
    """
    return offline_ef1_trace(values, n).final


class OnlineEF1:
    """Recomputes ``offline_ef1`` on M_t each round. Values must be positive.

    ``history`` keeps every round's repair trace for inspection.
    """

    def __init__(self, n: int, L: int | None = None, R: int | None = None):
        self.n = n
        self.L, self.R = L, R
        self._values: list[int] = []
        self.history: list[Ef1Repair] = []

    def step(self, item_values: tuple[int, ...]) -> ContiguousAllocation:
        v = _identical_value(item_values)
        if v <= 0:
            raise ValueError(f"ef1-leximin-online needs values in [L, R] with L > 0, got {v}")
        if (self.L is not None and v < self.L) or (self.R is not None and v > self.R):
            raise ValueError(f"value {v} outside the declared range [{self.L}, {self.R}]")
        self._values.append(v)
        trace = offline_ef1_trace(self._values, self.n)
        self.history.append(trace)
        return trace.final


def offline_propa_splitter(V: ValuationProfile) -> ContiguousAllocation:
    """Left-to-right sweep handing each block to the first active agent it satisfies.

    An agent i is satisfied by a nonempty block when
    n * v_i(block) >= v_i(M) - (n-1) * max_g v_i(g). Items left after every
    agent is served join the last block; agents still active at the end of the
    line take the remainder (first of them) or an empty block.
    """
    if not V.goods_only:
        raise UnsupportedInstance("the proportional splitter handles goods only")
    n, m = V.n, V.t
    need = [sum(row) - (n - 1) * max(row, default=0) for row in V.values]
    active = list(range(1, n + 1))
    order: list[int] = []
    cuts: list[int] = []
    block_value = [0] * n
    for g in range(1, m + 1):
        if not active:
            break
        for a in range(n):
            block_value[a] += V.values[a][g - 1]
        winner = next((a for a in active if n * block_value[a - 1] >= need[a - 1]), None)
        if winner is not None:
            active.remove(winner)
            order.append(winner)
            cuts.append(g)
            block_value = [0] * n
    if active:
        # first waiting agent takes the remainder, the rest get empty blocks
        order.extend(active)
        cuts.extend([m] * (len(active) - 1))
    else:
        cuts = cuts[: n - 1]
    return ContiguousAllocation(tuple(cuts), m, tuple(order))


class RerunOffline:
    """Online wrapper that recomputes an offline contiguous algorithm each round."""

    def __init__(self, n: int, solve: Callable[[ValuationProfile], ContiguousAllocation]):
        self.n = n
        self._solve = solve
        self._columns: list[tuple[int, ...]] = []

    def step(self, item_values: tuple[int, ...]) -> ContiguousAllocation:
        self._columns.append(tuple(item_values))
        V = ValuationProfile(tuple(tuple(col[a] for col in self._columns) for a in range(self.n)))
        return self._solve(V)

"""Online allocators for the noncontiguous setting, plus round-robin."""
from __future__ import annotations

import logging
from typing import Callable, Sequence

from .core import Allocation, UnsupportedInstance, ValuationProfile

logger = logging.getLogger(__name__)


class EnvyBalancing:
    """Two agents, mixed manna.

    Keeps an envy-free part G and an EF1 part C. New items go into C; when the
    agents envy each other in C its bundles are swapped, and as soon as C is
    envy-free it is merged into G.
    """

    def __init__(self, n: int = 2):
        if n != 2:
            raise UnsupportedInstance("envy balancing is defined for exactly two agents")
        self.n = 2
        self.t = 0
        self.G: tuple[set[int], set[int]] = (set(), set())
        self.C: tuple[set[int], set[int]] = (set(), set())
        self._v: tuple[dict[int, int], dict[int, int]] = ({}, {})

    def _val(self, agent: int, items: set[int]) -> int:
        v = self._v[agent - 1]
        return sum(v[g] for g in items)

    def envies(self, i: int, j: int) -> bool:
        """Whether agent i envies agent j within C."""
        return self._val(i, self.C[i - 1]) < self._val(i, self.C[j - 1])

    def step(self, item_values: tuple[int, ...]) -> Allocation:
        v1, v2 = item_values
        self.t += 1
        g = self.t
        self._v[0][g], self._v[1][g] = v1, v2
        a1_unenvied = not self.envies(2, 1)
        a1_content = not self.envies(1, 2)
        if (a1_unenvied and v1 > 0) or (v1 > 0 and v2 <= 0) or (a1_content and v1 <= 0 and v2 <= 0):
            self.C[0].add(g)
        else:
            self.C[1].add(g)
        if self.envies(1, 2) and self.envies(2, 1):
            self.C = (self.C[1], self.C[0])
            logger.debug("round %d: swapped C (%d items)", g, len(self.C[0]) + len(self.C[1]))
        if not self.envies(1, 2) and not self.envies(2, 1):
            self.G[0].update(self.C[0])
            self.G[1].update(self.C[1])
            self.C = (set(), set())
        owner = [0] * g
        for agent in (1, 2):
            for x in self.G[agent - 1] | self.C[agent - 1]:
                owner[x - 1] = agent
        return Allocation(tuple(owner), 2)


def _pick(candidates: Sequence[int], key: Callable[[int], int], largest: bool) -> int:
    """Agent minimising (or maximising) ``key``; lowest index on ties."""
    if largest:
        return min(candidates, key=lambda a: (-key(a), a))
    return min(candidates, key=lambda a: (key(a), a))


class GreedyRestricted:
    """Restricted additive valuations: the new item goes to the poorest interested agent.

    An item nobody values goes to the globally poorest agent. With
    ``chores=True`` a chore goes to the richest agent among those who do not
    mind it (value 0); only when everybody minds it does the richest agent
    overall take it.
    """

    def __init__(self, n: int, chores: bool = False):
        self.n = n
        self.chores = chores
        self.own_value = [0] * n
        self._owner: list[int] = []

    def step(self, item_values: tuple[int, ...]) -> Allocation:
        if self.chores:
            pool = [a for a in range(1, self.n + 1) if item_values[a - 1] == 0]
        else:
            pool = [a for a in range(1, self.n + 1) if item_values[a - 1] > 0]
        pool = pool or list(range(1, self.n + 1))
        k = _pick(pool, lambda a: self.own_value[a - 1], largest=self.chores)
        self.own_value[k - 1] += item_values[k - 1]
        self._owner.append(k)
        return Allocation(tuple(self._owner), self.n)


class GreedyIdentical:
    """Identical valuations: the new item goes to the agent whose bundle is worth least.

    ``set_value`` evaluates a bundle (a frozenset of item indices) under a
    general monotone valuation; by default bundles are valued additively from
    the stream (agent 1's column).
    """

    def __init__(self, n: int, set_value: Callable[[frozenset[int]], int] | None = None, chores: bool = False):
        self.n = n
        self.chores = chores
        self.set_value = set_value
        self.bundles: list[set[int]] = [set() for _ in range(n)]
        self.own_value = [0] * n
        self._owner: list[int] = []

    def _bundle_value(self, a: int) -> int:
        if self.set_value is not None:
            return self.set_value(frozenset(self.bundles[a - 1]))
        return self.own_value[a - 1]

    def step(self, item_values: tuple[int, ...]) -> Allocation:
        if len(set(item_values)) > 1:
            raise UnsupportedInstance("greedy-identical needs identical valuations")
        k = _pick(range(1, self.n + 1), self._bundle_value, largest=self.chores)
        g = len(self._owner) + 1
        self.bundles[k - 1].add(g)
        self.own_value[k - 1] += item_values[0]
        self._owner.append(k)
        return Allocation(tuple(self._owner), self.n)


class LayerUpdating:
    """Round-robin-like layers: layer k holds one item per agent (slot 0 = empty).

    A new item is carried down the layers; in each layer, while some agent
    prefers the carried item to its own slot, the item is swapped into the
    slot of such an agent. ``argmin="value"`` (default) picks the agent whose
    slot is worth least to it, so with identical valuations a layer sees at
    most one swap; ``argmin="index"`` picks the slot item that arrived first.
    Ties go to the smaller item index. The leftover item fills the next free
    slot of the last layer.
    """

    def __init__(self, n: int, argmin: str = "value"):
        if argmin not in ("index", "value"):
            raise ValueError("argmin must be 'index' or 'value'")
        self.n = n
        self.argmin = argmin
        self.t = 0
        self.layers: list[list[int]] = []
        self._v: list[list[int]] = [[0] for _ in range(n)]  # _v[a-1][g], g=0 is the sentinel
        self.swaps = 0

    def v(self, agent: int, item: int) -> int:
        return self._v[agent - 1][item]

    def step(self, item_values: tuple[int, ...]) -> Allocation:
        if any(x < 0 for x in item_values):
            raise UnsupportedInstance("layer updating handles goods only")
        self.t += 1
        t, n = self.t, self.n
        for a in range(n):
            self._v[a].append(item_values[a])
        k = -(-t // n)
        if len(self.layers) < k:
            self.layers.append([0] * n)
        x = t
        for layer in self.layers[: k - 1]:
            while True:
                G = [a for a in range(1, n + 1) if self.v(a, x) > self.v(a, layer[a - 1])]
                if not G:
                    break
                if self.argmin == "index":
                    a_hat = min(G, key=lambda a: layer[a - 1])
                else:
                    a_hat = min(G, key=lambda a: (self.v(a, layer[a - 1]), layer[a - 1]))
                x, layer[a_hat - 1] = layer[a_hat - 1], x
                self.swaps += 1
        self.layers[k - 1][t - n * (k - 1) - 1] = x
        return self.allocation()

    def allocation(self) -> Allocation:
        owner = [0] * self.t
        for layer in self.layers:
            for a, g in enumerate(layer, 1):
                if g:
                    owner[g - 1] = a
        return Allocation(tuple(owner), self.n)

    def round_robin_property(self) -> bool:
        """v_i(C_i^k) >= v_i(C_j^{k+1}) for all agents i, j and layers k."""
        for upper, lower in zip(self.layers, self.layers[1:]):
            for i in range(1, self.n + 1):
                mine = self.v(i, upper[i - 1])
                if any(self.v(i, g) > mine for g in lower):
                    return False
        return True


def round_robin(V: ValuationProfile) -> tuple[Allocation, list[list[int]]]:
    """Agents 1..n pick their favourite remaining item in turn.

    Ties between items go to the smallest index. Returns the allocation and
    the pick table: ``table[j - 1][i - 1]`` is the item agent i picked in
    round j, 0 if it picked nothing.

    >>> V = ValuationProfile.identical_values(2, [3, 2, 1])
    >>> round_robin(V)[1]
    [[1, 2], [3, 0]]
    """
    if not V.goods_only:
        raise UnsupportedInstance("round robin is run on goods here")
    n, m = V.n, V.t
    remaining = list(range(1, m + 1))
    owner = [0] * m
    table: list[list[int]] = []
    while remaining:
        row = [0] * n
        for i in range(1, n + 1):
            if not remaining:
                break
            vals = V.values[i - 1]
            g = min(remaining, key=lambda x: (-vals[x - 1], x))
            remaining.remove(g)
            row[i - 1] = g
            owner[g - 1] = i
        table.append(row)
    return Allocation(tuple(owner), n), table


class RoundRobinRerun:
    """Re-runs round robin on everything that has arrived, every round."""

    def __init__(self, n: int):
        self.n = n
        self._columns: list[tuple[int, ...]] = []
        self.table: list[list[int]] = []

    def step(self, item_values: tuple[int, ...]) -> Allocation:
        self._columns.append(tuple(item_values))
        V = ValuationProfile(tuple(tuple(col[a] for col in self._columns) for a in range(self.n)))
        alloc, self.table = round_robin(V)
        return alloc

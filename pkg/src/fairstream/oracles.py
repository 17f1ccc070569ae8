"""Exhaustive ground truth for small instances.

Every enumerator takes a budget and refuses (BudgetExceeded) instead of
sampling when the search space is larger.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .core import Allocation, ContiguousAllocation, ValuationProfile, count_adjustments, induce
from .fairness import Order, SortedValueTuple, compare_leximin2, evaluate

DEFAULT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    def __init__(self, count: int, budget: int, what: str = "allocations"):
        super().__init__(f"{count} {what} exceed the budget of {budget}")
        self.count = count
        self.budget = budget


def count_contiguous(n: int, t: int, permute: bool = False) -> int:
    return math.comb(t + n - 1, n - 1) * (math.factorial(n) if permute else 1)


def enumerate_contiguous(n: int, t: int, budget: int = DEFAULT_BUDGET,
                         permute: bool = False) -> Iterator[ContiguousAllocation]:
    """Every cut tuple 0 <= p_1 <= ... <= p_{n-1} <= t once, in lexicographic order.

    With ``permute`` each cut tuple is paired with every agent order.
    """
    total = count_contiguous(n, t, permute)
    if total > budget:
        raise BudgetExceeded(total, budget)
    orders = list(itertools.permutations(range(1, n + 1))) if permute else [None]
    for cuts in itertools.combinations_with_replacement(range(t + 1), n - 1):
        for order in orders:
            yield ContiguousAllocation(cuts, t, order)


def brute_leximin2(values: Sequence[int], n: int, budget: int = DEFAULT_BUDGET) -> ContiguousAllocation:
    """Best contiguous allocation under the leximin^2 order, by full scan."""
    m = len(values)
    prefix = [0, *itertools.accumulate(values)]
    best, best_key = None, None
    for ca in enumerate_contiguous(n, m, budget):
        pts = ca.points
        key = SortedValueTuple.of_blocks([prefix[pts[b]] - prefix[pts[b - 1]] for b in range(1, n + 1)], pts[1:])
        if best_key is None or compare_leximin2(key, best_key) is Order.BETTER:
            best, best_key = ca, key
    return best


def ef1_literal(owner: Sequence[int], V: ValuationProfile) -> bool:
    """EF1 straight from the definition: no envy, or some g in A_i + A_j fixes it."""
    bundles = [set() for _ in range(V.n)]
    for g, a in enumerate(owner, 1):
        bundles[a - 1].add(g)
    for i in range(1, V.n + 1):
        Ai = bundles[i - 1]
        for j in range(1, V.n + 1):
            if i == j:
                continue
            Aj = bundles[j - 1]
            if V.bundle_value(i, Ai) >= V.bundle_value(i, Aj):
                continue
            if not any(V.bundle_value(i, Ai - {g}) >= V.bundle_value(i, Aj - {g}) for g in Ai | Aj):
                return False
    return True


def brute_ef1_noncontiguous(V: ValuationProfile, budget: int = 3**8) -> list[tuple[int, ...]]:
    """All EF1 owner vectors of M_t, enumerated in lexicographic order."""
    total = V.n ** V.t
    if total > budget:
        raise BudgetExceeded(total, budget)
    return [owner for owner in itertools.product(range(1, V.n + 1), repeat=V.t) if ef1_literal(owner, V)]


def _default_permute(V: ValuationProfile) -> bool:
    # identical agents keep the line order; otherwise any agent may take any block
    return not V.identical


def valid_allocations(V: ValuationProfile, notion: str, contiguous: bool = True, permute: bool | None = None,
                      budget: int = DEFAULT_BUDGET) -> list[Allocation]:
    """Distinct owner vectors of M_t (t = V.t) satisfying ``notion``."""
    if permute is None:
        permute = _default_permute(V)
    if contiguous:
        candidates = (induce(ca) for ca in enumerate_contiguous(V.n, V.t, budget, permute))
    else:
        total = V.n ** V.t
        if total > budget:
            raise BudgetExceeded(total, budget)
        candidates = (Allocation(o, V.n) for o in itertools.product(range(1, V.n + 1), repeat=V.t))
    seen: dict[tuple[int, ...], Allocation] = {}
    for alloc in candidates:
        if alloc.owner not in seen and evaluate(notion, alloc, V).satisfied:
            seen[alloc.owner] = alloc
    return list(seen.values())


@dataclass(frozen=True)
class ForcedOwnershipCertificate:
    round: int
    block: int | None
    item: int | None
    owners: frozenset[int]
    notion: str
    valid_count: int
    prefix: int | None = None
    prefix_owners: frozenset[tuple[int, ...]] = frozenset()

    @property
    def forced(self) -> int | None:
        """The unique owner, if there is exactly one."""
        return next(iter(self.owners)) if len(self.owners) == 1 else None

    @property
    def prefix_forced(self) -> int | None:
        """Agent holding all of g_1..g_prefix in every valid allocation, if any."""
        if len(self.prefix_owners) != 1:
            return None
        (owners,) = self.prefix_owners
        return owners[0] if len(set(owners)) == 1 else None

    def to_json(self, digest: str | None = None) -> dict:
        out = {"round": self.round, "block": self.block, "owners": sorted(self.owners),
               "notion": self.notion, "valid_count": self.valid_count}
        if self.item is not None:
            out["item"] = self.item
        if self.prefix is not None:
            out["prefix"] = self.prefix
            out["prefix_forced_owner"] = self.prefix_forced
        if digest is not None:
            out["instance_digest"] = digest
        return out


def certify_forced_block(V: ValuationProfile, notion: str, t: int, block: int = 1, item: int | None = None,
                         prefix: int | None = None, permute: bool | None = None,
                         budget: int = DEFAULT_BUDGET) -> ForcedOwnershipCertificate:
    """Owners that hold a block (or item g_item) in some valid contiguous allocation of M_t.

    ``block`` counts blocks in line order, empty ones included; ``item`` asks
    instead for the owner of the block containing that item. With ``prefix``
    the owner tuples of g_1..g_prefix are collected too.
    """
    sub = V.prefix(t)
    if permute is None:
        permute = _default_permute(V)
    owners: set[int] = set()
    prefix_owners: set[tuple[int, ...]] = set()
    count = 0
    seen: set[tuple] = set()
    for ca in enumerate_contiguous(sub.n, t, budget, permute):
        alloc = induce(ca)
        key = (alloc.owner, ca.agent_of_block(block)) if item is None else alloc.owner
        if key in seen:
            continue
        seen.add(key)
        if not evaluate(notion, alloc, sub).satisfied:
            continue
        count += 1
        owners.add(ca.agent_of_block(block) if item is None else alloc.owner[item - 1])
        if prefix is not None:
            prefix_owners.add(alloc.owner[:prefix])
    return ForcedOwnershipCertificate(t, block if item is None else None, item, frozenset(owners), notion.upper(),
                                      count, prefix, frozenset(prefix_owners))


@dataclass
class Schedule:
    optimum: int | None
    allocations: list[Allocation] = field(default_factory=list)
    infeasible_round: int | None = None

    @property
    def feasible(self) -> bool:
        return self.infeasible_round is None


def min_adjustment_schedule(V: ValuationProfile, notion: str, contiguous: bool = True, permute: bool | None = None,
                            budget: int = DEFAULT_BUDGET) -> Schedule:
    """Fewest total adjustments any algorithm needs to stay valid in every round.

    Shortest path through the layered graph whose round-t layer holds the valid
    allocations of M_t, edges weighted by ``count_adjustments``.
    """
    layers: list[list[Allocation]] = []
    edges = 0
    for t in range(1, V.t + 1):
        layer = valid_allocations(V.prefix(t), notion, contiguous, permute, budget)
        if not layer:
            return Schedule(None, [], infeasible_round=t)
        if layers:
            edges += len(layers[-1]) * len(layer)
            if edges > budget:
                raise BudgetExceeded(edges, budget, "edges")
        layers.append(layer)
    if not layers:
        return Schedule(0, [])
    dist = [0] * len(layers[0])
    back: list[list[int]] = [[-1] * len(layers[0])]
    for prev, layer in zip(layers, layers[1:]):
        new_dist, new_back = [], []
        for node in layer:
            best, arg = None, -1
            for k, p in enumerate(prev):
                d = dist[k] + count_adjustments(p, node)
                if best is None or d < best:
                    best, arg = d, k
            new_dist.append(best)
            new_back.append(arg)
        dist = new_dist
        back.append(new_back)
    end = min(range(len(dist)), key=dist.__getitem__)
    path = [end]
    for t in range(len(layers) - 1, 0, -1):
        path.append(back[t][path[-1]])
    path.reverse()
    return Schedule(dist[end], [layers[t][k] for t, k in enumerate(path)])

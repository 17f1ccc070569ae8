"""Fairness checkers (EF, EF1, PROPa, the per-agent proportionality condition)
and the leximin / leximin^2 comparison used for contiguous blocks.

All 1/n-scaled thresholds are multiplied through by n.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .core import Allocation, ContractViolation, UnsupportedInstance, ValuationProfile


@dataclass(frozen=True)
class FairnessReport:
    notion: str
    satisfied: bool
    witness: dict | None = None

    def __post_init__(self):
        if not self.satisfied and self.witness is None:
            raise ValueError("a failed report must carry a witness")

    def __bool__(self) -> bool:
        return self.satisfied


def _check_cover(A: Allocation, V: ValuationProfile) -> None:
    if A.t != V.t or A.n != V.n:
        raise ContractViolation(f"allocation ({A.n} agents, {A.t} items) does not match profile "
                                f"({V.n} agents, {V.t} items)")


def is_ef(A: Allocation, V: ValuationProfile) -> FairnessReport:
    _check_cover(A, V)
    bundles = A.bundles()
    for i in range(1, V.n + 1):
        own = V.bundle_value(i, bundles[i - 1])
        for j in range(1, V.n + 1):
            if i != j:
                other = V.bundle_value(i, bundles[j - 1])
                if own < other:
                    return FairnessReport("EF", False, {"i": i, "j": j, "own": own, "other": other})
    return FairnessReport("EF", True)


def is_ef1(A: Allocation, V: ValuationProfile) -> FairnessReport:
    """EF1 in the mixed-manna form.

    For each envious pair the cheapest fixes are tried first (drop the worst
    item of one's own bundle, or the best item of the other bundle); if neither
    works every g in A_i + A_j is scanned to build the witness.
    """
    _check_cover(A, V)
    bundles = A.bundles()
    worst = None
    for i in range(1, V.n + 1):
        row = V.values[i - 1]
        own_items = bundles[i - 1]
        own = sum(row[g - 1] for g in own_items)
        for j in range(1, V.n + 1):
            if i == j:
                continue
            other_items = bundles[j - 1]
            other = sum(row[g - 1] for g in other_items)
            if own >= other:
                continue
            if own_items and own - min(row[g - 1] for g in own_items) >= other:
                continue
            if other_items and own >= other - max(row[g - 1] for g in other_items):
                continue
            # no single removal closes the gap; record the smallest residual envy
            best_gap, best_g = None, None
            for g in own_items:
                gap = other - (own - row[g - 1])
                if best_gap is None or gap < best_gap:
                    best_gap, best_g = gap, g
            for g in other_items:
                gap = (other - row[g - 1]) - own
                if best_gap is None or gap < best_gap:
                    best_gap, best_g = gap, g
            if best_gap is None:
                best_gap = other - own
            if worst is None or best_gap > worst["residual"]:
                worst = {"i": i, "j": j, "own": own, "other": other,
                         "best_removal": best_g, "residual": best_gap}
    if worst is not None:
        return FairnessReport("EF1", False, worst)
    return FairnessReport("EF1", True)


def is_ef1_identical_general(bundles: Sequence[Sequence[int]], set_value: Callable[[frozenset[int]], int]) -> FairnessReport:
    """EF1 for an identical monotone (possibly non-additive) valuation."""
    sets = [frozenset(b) for b in bundles]
    for i, Ai in enumerate(sets, 1):
        own = set_value(Ai)
        for j, Aj in enumerate(sets, 1):
            if i == j or own >= set_value(Aj):
                continue
            if any(set_value(Ai - {g}) >= set_value(Aj - {g}) for g in Ai | Aj):
                continue
            return FairnessReport("EF1", False, {"i": i, "j": j, "own": own, "other": set_value(Aj)})
    return FairnessReport("EF1", True)


def _require_goods(V: ValuationProfile, notion: str) -> None:
    if not V.goods_only:
        raise UnsupportedInstance(f"{notion} is defined here for goods only")


def is_propa(A: Allocation, V: ValuationProfile) -> FairnessReport:
    """n * v_i(A_i) >= v_i(M) - (n-1) * v_max with v_max over all agents and items."""
    _check_cover(A, V)
    _require_goods(V, "PROPa")
    n = V.n
    vmax = max((x for row in V.values for x in row), default=0)
    bundles = A.bundles()
    for i in range(1, n + 1):
        lhs = n * V.bundle_value(i, bundles[i - 1])
        rhs = sum(V.values[i - 1]) - (n - 1) * vmax
        if lhs < rhs:
            return FairnessReport("PROPa", False, {"i": i, "lhs": lhs, "rhs": rhs, "scale": n})
    return FairnessReport("PROPa", True)


def satisfies_eq1(A: Allocation, V: ValuationProfile) -> FairnessReport:
    """Like ``is_propa`` but each agent uses its own maximum item value."""
    _check_cover(A, V)
    _require_goods(V, "Eq1")
    n = V.n
    bundles = A.bundles()
    for i in range(1, n + 1):
        row = V.values[i - 1]
        lhs = n * V.bundle_value(i, bundles[i - 1])
        rhs = sum(row) - (n - 1) * max(row, default=0)
        if lhs < rhs:
            return FairnessReport("Eq1", False, {"i": i, "lhs": lhs, "rhs": rhs, "scale": n})
    return FairnessReport("Eq1", True)


CHECKERS: dict[str, Callable[[Allocation, ValuationProfile], FairnessReport]] = {
    "ef": is_ef,
    "ef1": is_ef1,
    "propa": is_propa,
    "eq1": satisfies_eq1,
}


def evaluate(notion: str, A: Allocation, V: ValuationProfile) -> FairnessReport:
    try:
        checker = CHECKERS[notion.lower()]
    except KeyError:
        raise ValueError(f"unknown fairness notion {notion!r}; choose from {sorted(CHECKERS)}") from None
    return checker(A, V)


class Order(Enum):
    BETTER = 1
    EQUAL = 0
    WORSE = -1


@dataclass(frozen=True)
class SortedValueTuple:
    """Q(A) (block values sorted nondecreasing) with the cut tuple P(A)."""

    q: tuple[int, ...]
    p: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(self.q))
        object.__setattr__(self, "p", tuple(self.p))
        if any(a > b for a, b in zip(self.q, self.q[1:])):
            raise ValueError(f"q must be sorted nondecreasing, got {self.q}")

    @classmethod
    def of_blocks(cls, block_values: Sequence[int], p: Sequence[int]) -> "SortedValueTuple":
        return cls(tuple(sorted(block_values)), tuple(p))

    def extend(self, block_value: int, cut: int) -> "SortedValueTuple":
        q = list(self.q)
        bisect.insort(q, block_value)
        return SortedValueTuple(tuple(q), (*self.p, cut))


def compare_leximin2(x: SortedValueTuple, y: SortedValueTuple) -> Order:
    """Larger sorted values win; equal values fall back to the smaller cut tuple."""
    if len(x.q) != len(y.q) or len(x.p) != len(y.p):
        raise ContractViolation("leximin2 comparison needs tuples over the same number of agents")
    if x.q != y.q:
        return Order.BETTER if x.q > y.q else Order.WORSE
    if x.p != y.p:
        return Order.BETTER if x.p < y.p else Order.WORSE
    return Order.EQUAL

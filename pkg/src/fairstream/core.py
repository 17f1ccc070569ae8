"""Domain types, the online-allocator contract and adjustment accounting.

Agents and items are 1-indexed. All values are Python ints, so comparisons
stay exact no matter how large the instance values get.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Callable, Iterable, Protocol, Sequence

logger = logging.getLogger(__name__)

CLASS_FLAGS = ("identical", "binary", "restricted_additive", "goods_only", "chores_only")


class ContractViolation(Exception):
    """An allocator or caller broke a documented pre/post-condition."""


class UnsupportedInstance(ValueError):
    """The algorithm or notion does not apply to this kind of profile."""


class FairnessViolation(Exception):
    def __init__(self, round_: int, report):
        super().__init__(f"round {round_}: {report.notion} violated ({report.witness})")
        self.round = round_
        self.report = report


@dataclass(frozen=True)
class ValuationProfile:
    """Additive valuations: ``values[i - 1][j - 1]`` is agent i's value for g_j.

    ``declared`` lists class flags the caller asserts; they are checked
    against the data at construction.
    """

    values: tuple[tuple[int, ...], ...]
    declared: frozenset[str] = frozenset()

    def __post_init__(self):
        vals = tuple(tuple(int(x) for x in row) for row in self.values)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "declared", frozenset(self.declared))
        if not vals:
            raise ValueError("a profile needs at least one agent")
        if len({len(row) for row in vals}) != 1:
            raise ValueError("every agent must value the same number of items")
        unknown = self.declared - set(CLASS_FLAGS)
        if unknown:
            raise ValueError(f"unknown class flags: {sorted(unknown)}")
        for flag in self.declared:
            if not getattr(self, flag):
                raise ValueError(f"profile declared {flag!r} but the values are not")

    @classmethod
    def identical_values(cls, n: int, values: Sequence[int], declared=()) -> "ValuationProfile":
        row = tuple(values)
        return cls(tuple(row for _ in range(n)), frozenset(declared) | {"identical"})

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def t(self) -> int:
        return len(self.values[0])

    def v(self, agent: int, item: int) -> int:
        return self.values[agent - 1][item - 1]

    def item(self, item: int) -> tuple[int, ...]:
        """Values of g_item for agents 1..n."""
        return tuple(row[item - 1] for row in self.values)

    def bundle_value(self, agent: int, items: Iterable[int]) -> int:
        row = self.values[agent - 1]
        return sum(row[g - 1] for g in items)

    def prefix(self, t: int) -> "ValuationProfile":
        """The profile restricted to M_t."""
        if not 0 <= t <= self.t:
            raise ValueError(f"prefix length {t} outside 0..{self.t}")
        return ValuationProfile(tuple(row[:t] for row in self.values), self.declared)

    # class flags, always derived from the data
    @property
    def identical(self) -> bool:
        return all(row == self.values[0] for row in self.values)

    @property
    def binary(self) -> bool:
        return all(x in (0, 1) for row in self.values for x in row)

    @property
    def goods_only(self) -> bool:
        return all(x >= 0 for row in self.values for x in row)

    @property
    def chores_only(self) -> bool:
        return all(x <= 0 for row in self.values for x in row)

    @property
    def restricted_additive(self) -> bool:
        for j in range(self.t):
            nonzero = {row[j] for row in self.values if row[j] != 0}
            if len(nonzero) > 1:
                return False
        return True

    @property
    def class_flags(self) -> dict[str, bool]:
        return {flag: getattr(self, flag) for flag in CLASS_FLAGS}

    def distinct_values(self) -> int:
        """max_i |{v_i(g) : g in M}|."""
        return max(len(set(row)) for row in self.values) if self.t else 0


class IntervalValuationOracle:
    """Identical monotone valuation of contiguous blocks M_{l,r} = {g_{l+1}..g_r}."""

    def __init__(self, evaluator: Callable[[int, int], int]):
        self._evaluator = evaluator

    def __call__(self, l: int, r: int) -> int:
        if l >= r:
            return 0
        return self._evaluator(l, r)

    @classmethod
    def additive(cls, values: Sequence[int]) -> "IntervalValuationOracle":
        prefix = [0, *accumulate(values)]
        return cls(lambda l, r: prefix[r] - prefix[l])

    @classmethod
    def from_set_valuation(cls, set_value: Callable[[frozenset[int]], int]) -> "IntervalValuationOracle":
        return cls(lambda l, r: set_value(frozenset(range(l + 1, r + 1))))


def concave_valuation(weights: Sequence[int], shape: Callable[[int], int]) -> Callable[[frozenset[int]], int]:
    """Monotone set valuation ``shape(sum of weights in S)``.

    With a nondecreasing ``shape`` (isqrt, a cap, ...) the result is a general
    non-additive identical valuation.
    """
    w = tuple(weights)

    def value(items: frozenset[int]) -> int:
        return shape(sum(w[g - 1] for g in items))

    return value


@dataclass(frozen=True)
class Allocation:
    """``owner[j - 1]`` is the agent holding g_j."""

    owner: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "owner", tuple(self.owner))
        if self.n < 1:
            raise ValueError("n must be positive")
        for a in self.owner:
            if not 1 <= a <= self.n:
                raise ContractViolation(f"owner {a} outside 1..{self.n}")

    @property
    def t(self) -> int:
        return len(self.owner)

    def bundle(self, agent: int) -> list[int]:
        return [j for j, a in enumerate(self.owner, 1) if a == agent]

    def bundles(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for j, a in enumerate(self.owner, 1):
            out[a - 1].append(j)
        return out

    @classmethod
    def from_bundles(cls, bundles: Sequence[Iterable[int]]) -> "Allocation":
        owner: dict[int, int] = {}
        for a, items in enumerate(bundles, 1):
            for g in items:
                if g in owner:
                    raise ContractViolation(f"item {g} assigned twice")
                owner[g] = a
        t = len(owner)
        if set(owner) != set(range(1, t + 1)):
            raise ContractViolation("bundles do not cover a prefix g_1..g_t")
        return cls(tuple(owner[j] for j in range(1, t + 1)), len(bundles))


@dataclass(frozen=True)
class ContiguousAllocation:
    """Cut points p_1 <= ... <= p_{n-1} over M_t.

    Block b is M_{p_{b-1}, p_b} (p_0 = 0, p_n = t). With identical valuations
    agent b always takes block b; ``order`` overrides that for nonidentical
    instances, giving the agent that takes each block in line order.
    """

    cuts: tuple[int, ...]
    t: int
    order: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(self.cuts))
        if self.order is not None:
            object.__setattr__(self, "order", tuple(self.order))
            if sorted(self.order) != list(range(1, self.n + 1)):
                raise ContractViolation(f"order {self.order} is not a permutation of 1..{self.n}")
        prev = 0
        for p in (*self.cuts, self.t):
            if p < prev:
                raise ContractViolation(f"cuts {self.cuts} not nondecreasing within 0..{self.t}")
            prev = p

    @property
    def n(self) -> int:
        return len(self.cuts) + 1

    @property
    def points(self) -> tuple[int, ...]:
        """P(A) = (0, p_1, ..., p_{n-1}, t)."""
        return (0, *self.cuts, self.t)

    def block(self, b: int) -> tuple[int, int]:
        """(l, r) bounds of the b-th block in line order."""
        pts = self.points
        return pts[b - 1], pts[b]

    def agent_of_block(self, b: int) -> int:
        return self.order[b - 1] if self.order is not None else b


def induce(ca: ContiguousAllocation) -> Allocation:
    """Owner vector of a contiguous allocation."""
    owner: list[int] = []
    for b in range(1, ca.n + 1):
        l, r = ca.block(b)
        owner.extend([ca.agent_of_block(b)] * (r - l))
    return Allocation(tuple(owner), ca.n)


def as_allocation(a: Allocation | ContiguousAllocation) -> Allocation:
    return induce(a) if isinstance(a, ContiguousAllocation) else a


def count_adjustments(prev: Allocation | ContiguousAllocation, nxt: Allocation | ContiguousAllocation) -> int:
    """Items of M_{t-1} whose owner differs between consecutive rounds.

    >>> count_adjustments(Allocation((1, 1, 2), 2), Allocation((1, 2, 2, 2), 2))
    1
    """
    prev, nxt = as_allocation(prev), as_allocation(nxt)
    if nxt.t != prev.t + 1:
        raise ContractViolation(f"round lengths {prev.t} -> {nxt.t}; expected one new item")
    return sum(a != b for a, b in zip(prev.owner, nxt.owner))


def transfer_distance(a: Allocation | ContiguousAllocation, b: Allocation | ContiguousAllocation) -> int:
    """Items owned differently by two allocations of the same item set."""
    a, b = as_allocation(a), as_allocation(b)
    if a.t != b.t:
        raise ContractViolation("allocations cover different item sets")
    return sum(x != y for x, y in zip(a.owner, b.owner))


@dataclass
class AdjustmentLedger:
    per_round: list[int] = field(default_factory=list)

    @property
    def cumulative(self) -> int:
        return sum(self.per_round)

    def record(self, count: int) -> None:
        if count < 0:
            raise ValueError("adjustment counts are nonnegative")
        self.per_round.append(count)

    @classmethod
    def from_allocations(cls, allocations: Sequence[Allocation | ContiguousAllocation]) -> "AdjustmentLedger":
        ledger = cls()
        for t, alloc in enumerate(allocations):
            ledger.record(0 if t == 0 else count_adjustments(allocations[t - 1], alloc))
        return ledger


class OnlineAllocator(Protocol):
    """Receives one item per call and returns an allocation of everything so far."""

    n: int

    def step(self, item_values: tuple[int, ...]) -> Allocation | ContiguousAllocation: ...


@dataclass
class RunResult:
    allocations: list[Allocation]
    ledger: AdjustmentLedger
    verdicts: list[dict[str, object]]
    raw: list[Allocation | ContiguousAllocation] = field(default_factory=list)


def run_online(allocator: OnlineAllocator, profile: ValuationProfile, check: Iterable[str] = (),
               strict: bool = False) -> RunResult:
    """Feed ``profile`` item by item to ``allocator``.

    ``check`` names fairness notions (see ``fairness.CHECKERS``) evaluated on
    every round's allocation restricted to M_t. Under ``strict`` the first
    violation raises FairnessViolation carrying the round number.
    """
    from .fairness import evaluate

    check = [c.lower() for c in check]
    if allocator.n != profile.n:
        raise ContractViolation(f"allocator built for n={allocator.n}, instance has n={profile.n}")
    allocations: list[Allocation] = []
    raw: list[Allocation | ContiguousAllocation] = []
    ledger = AdjustmentLedger()
    verdicts: list[dict[str, object]] = []
    for t in range(1, profile.t + 1):
        out = allocator.step(profile.item(t))
        alloc = as_allocation(out)
        if alloc.t != t or alloc.n != profile.n:
            raise ContractViolation(f"round {t}: allocator returned an allocation of {alloc.t} items")
        ledger.record(0 if t == 1 else count_adjustments(allocations[-1], alloc))
        allocations.append(alloc)
        raw.append(out)
        row: dict[str, object] = {}
        if check:
            sub = profile.prefix(t)
            for notion in check:
                report = evaluate(notion, alloc, sub)
                row[notion] = report.satisfied
                if strict and not report.satisfied:
                    raise FairnessViolation(t, report)
        verdicts.append(row)
    logger.debug("run finished: T=%d cumulative=%d", profile.t, ledger.cumulative)
    return RunResult(allocations, ledger, verdicts, raw)

"""Algorithm registry, experiment rows and bound reports behind the CLI."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .contiguous import (LumpyTie, OnlineEF1, PropaPointer, RerunOffline, leximin2_dp, offline_ef1,
                         offline_propa_splitter)
from .core import RunResult, UnsupportedInstance, ValuationProfile, run_online
from .noncontiguous import EnvyBalancing, GreedyIdentical, GreedyRestricted, LayerUpdating, RoundRobinRerun


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise UnsupportedInstance(msg)


def _check_identical_goods(V: ValuationProfile, name: str) -> None:
    _need(V.identical, f"{name} needs identical valuations")
    _need(V.goods_only, f"{name} needs goods (nonnegative values)")


def _check_two(V: ValuationProfile, name: str) -> None:
    _need(V.n == 2, f"{name} needs exactly two agents")


@dataclass(frozen=True)
class AlgorithmEntry:
    build: Callable[[ValuationProfile], object]
    validate: Callable[[ValuationProfile], None]
    contiguous: bool


def _validate_online_ef1(V: ValuationProfile) -> None:
    _check_identical_goods(V, "ef1-leximin-online")
    _need(all(x > 0 for x in V.values[0]), "ef1-leximin-online needs strictly positive values")


ALGORITHMS: dict[str, AlgorithmEntry] = {
    "envy-balancing": AlgorithmEntry(lambda V: EnvyBalancing(V.n), lambda V: _check_two(V, "envy-balancing"), False),
    "greedy-restricted": AlgorithmEntry(
        lambda V: GreedyRestricted(V.n),
        lambda V: (_need(V.restricted_additive, "greedy-restricted needs restricted additive valuations"),
                   _need(V.goods_only, "greedy-restricted needs goods")), False),
    "greedy-identical": AlgorithmEntry(lambda V: GreedyIdentical(V.n),
                                       lambda V: _check_identical_goods(V, "greedy-identical"), False),
    "layer-updating": AlgorithmEntry(lambda V: LayerUpdating(V.n),
                                     lambda V: _need(V.goods_only, "layer-updating needs goods"), False),
    "round-robin-rerun": AlgorithmEntry(lambda V: RoundRobinRerun(V.n),
                                        lambda V: _need(V.goods_only, "round-robin-rerun needs goods"), False),
    "propa-pointer": AlgorithmEntry(lambda V: PropaPointer(V.n),
                                    lambda V: _check_identical_goods(V, "propa-pointer"), True),
    "lumpy-tie": AlgorithmEntry(lambda V: LumpyTie(V.n),
                                lambda V: (_check_two(V, "lumpy-tie"), _check_identical_goods(V, "lumpy-tie")), True),
    "ef1-leximin-online": AlgorithmEntry(lambda V: OnlineEF1(V.n), _validate_online_ef1, True),
    "propa-splitter-offline": AlgorithmEntry(
        lambda V: RerunOffline(V.n, offline_propa_splitter),
        lambda V: _need(V.goods_only, "propa-splitter-offline needs goods"), True),
    "ef1-offline": AlgorithmEntry(lambda V: RerunOffline(V.n, lambda P: offline_ef1(P.values[0], P.n)),
                                  lambda V: _check_identical_goods(V, "ef1-offline"), True),
    "leximin2-dp": AlgorithmEntry(lambda V: RerunOffline(V.n, lambda P: leximin2_dp(P.values[0], P.n)[0]),
                                  lambda V: _check_identical_goods(V, "leximin2-dp"), True),
}


def build_allocator(name: str, V: ValuationProfile):
    try:
        entry = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None
    entry.validate(V)
    return entry.build(V)


@dataclass
class ExperimentConfig:
    algorithm: str
    profile: ValuationProfile
    check: list[str] = field(default_factory=list)
    strict: bool = False


def run_experiment(cfg: ExperimentConfig) -> tuple[RunResult, list[dict]]:
    allocator = build_allocator(cfg.algorithm, cfg.profile)
    result = run_online(allocator, cfg.profile, cfg.check, strict=cfg.strict)
    rows = []
    cumulative = 0
    for t, (adj, verdict) in enumerate(zip(result.ledger.per_round, result.verdicts), 1):
        cumulative += adj
        row = {"t": t, "adjustments": adj, "cumulative": cumulative}
        for notion in cfg.check:
            row[notion.lower()] = "true" if verdict[notion.lower()] else "false"
        rows.append(row)
    return result, rows


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def read_run_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


# name -> (bound as a function of the profile, hard?)
BOUNDS: dict[str, tuple[Callable[[ValuationProfile], Fraction], bool]] = {
    "propa-pointer": (lambda V: Fraction((V.n - 1) * V.t), True),
    "lumpy-tie": (lambda V: Fraction(V.t), True),
    "envy-balancing": (lambda V: Fraction(V.t), True),
    "layer-updating": (lambda V: Fraction(V.distinct_values() * V.t), True),
    "ef1-leximin-online": (lambda V: Fraction(max(V.values[0]), min(V.values[0])) * V.n ** 2 * V.t, False),
    "zero": (lambda V: Fraction(0), True),
}
SOFT_CEILING = 5


def bound_report(rows: Iterable[dict], V: ValuationProfile, bound: str) -> dict:
    """cumulative / bound for a finished run.

    Hard bounds flag any ratio above 1; the soft bound (the O(.) for the online
    EF1 algorithm) is only flagged above ``SOFT_CEILING``.
    """
    if bound not in BOUNDS:
        raise ValueError(f"unknown bound {bound!r}; choose from {sorted(BOUNDS)}")
    rows = list(rows)
    cumulative = int(rows[-1]["cumulative"]) if rows else 0
    fn, hard = BOUNDS[bound]
    value = fn(V) if V.t else Fraction(0)
    if value == 0:
        ratio = Fraction(0) if cumulative == 0 else None
    else:
        ratio = Fraction(cumulative) / value
    limit = 1 if hard else SOFT_CEILING
    return {
        "bound": bound,
        "hard": hard,
        "cumulative": cumulative,
        "bound_value": str(value),
        "ratio": None if ratio is None else str(ratio),
        "ratio_float": None if ratio is None else float(ratio),
        "limit": limit,
        "exceeded": ratio is None or ratio > limit,
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)

"""Command line front end: ``fairstream {run,gen,verify,oracle,bound-report}``.

Exit codes: 0 ok, 2 fairness violation under --strict, 3 oracle budget
refusal, 4 configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .core import FairnessViolation, UnsupportedInstance
from .generators import GENERATORS, PRNG_NAME, InstanceSpec, instance_digest, profile_to_json
from .harness import (ALGORITHMS, BOUNDS, ExperimentConfig, bound_report, dumps, read_run_csv, rows_to_csv,
                      run_experiment)
from .oracles import DEFAULT_BUDGET, BudgetExceeded, certify_forced_block, min_adjustment_schedule

EXIT_OK, EXIT_VIOLATION, EXIT_BUDGET, EXIT_CONFIG = 0, 2, 3, 4

logger = logging.getLogger("fairstream")


class ConfigError(Exception):
    pass


def _parse_params(items: list[str]) -> dict:
    params = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        params[key] = value
    return params


def _spec_from_args(args) -> InstanceSpec:
    if args.instance and args.gen:
        raise ConfigError("give either --instance or --gen, not both")
    if args.instance:
        try:
            return InstanceSpec.load(args.instance)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read instance {args.instance}: {exc}") from exc
    if args.gen:
        return InstanceSpec(generator=args.gen, params=_parse_params(args.param), seed=args.seed)
    raise ConfigError("an instance is required (--instance FILE or --gen NAME)")


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", help="instance JSON file")
    p.add_argument("--gen", choices=sorted(GENERATORS), help="named generator instead of a file")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="generator parameter")
    p.add_argument("--seed", type=int, default=None)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _parse_rounds(spec: str | None, T: int) -> list[int]:
    if not spec:
        return list(range(1, T + 1))
    rounds: list[int] = []
    for part in spec.split(","):
        lo, sep, hi = part.partition("..")
        if sep:
            rounds.extend(range(int(lo), int(hi) + 1))
        else:
            rounds.append(int(lo))
    bad = [r for r in rounds if not 1 <= r <= T]
    if bad:
        raise ConfigError(f"rounds {bad} outside 1..{T}")
    return rounds


def cmd_run(args) -> int:
    profile = _spec_from_args(args).resolve()
    check = [c.strip().lower() for c in args.check.split(",") if c.strip()] if args.check else []
    cfg = ExperimentConfig(args.algo, profile, check, args.strict)
    try:
        _, rows = run_experiment(cfg)
    except FairnessViolation as exc:
        logger.error("fairness violation in round %d: %s", exc.round, exc.report.witness)
        print(json.dumps({"violation": exc.report.notion, "round": exc.round}), file=sys.stderr)
        return EXIT_VIOLATION
    columns = ["t", "adjustments", "cumulative", *check]
    if args.format == "json":
        _emit(dumps({"algorithm": args.algo, "n": profile.n, "T": profile.t, "rows": rows}), args.out)
    else:
        _emit(rows_to_csv(rows, columns), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = _spec_from_args(args)
    profile = spec.resolve()
    meta = {"generator": spec.generator, "params": spec.params, "seed": spec.seed, "prng": PRNG_NAME,
            "digest": instance_digest(profile)}
    _emit(json.dumps(profile_to_json(profile, meta)), args.out)
    return EXIT_OK


def _certificates(args, profile) -> list[dict]:
    permute = None if args.order == "auto" else args.order == "any"
    digest = instance_digest(profile)
    certs = []
    for r in _parse_rounds(args.rounds, profile.t):
        cert = certify_forced_block(profile, args.notion, r, block=args.block, item=args.item, prefix=args.prefix,
                                    permute=permute, budget=args.budget)
        rec = cert.to_json(digest)
        if cert.valid_count == 0:
            rec["status"] = "no valid allocation"
        certs.append(rec)
    return certs


def cmd_oracle(args) -> int:
    profile = _spec_from_args(args).resolve()
    lines = [json.dumps(c, sort_keys=True) for c in _certificates(args, profile)]
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    profile = _spec_from_args(args).resolve()
    report: dict = {"instance_digest": instance_digest(profile), "notion": args.notion.upper(),
                    "contiguous": args.contiguous}
    if args.contiguous:
        report["certificates"] = _certificates(args, profile)
    if args.min_adjust:
        permute = None if args.order == "auto" else args.order == "any"
        sched = min_adjustment_schedule(profile, args.notion, args.contiguous, permute, args.budget)
        if sched.feasible:
            report["min_adjustments"] = sched.optimum
            report["schedule"] = [list(a.owner) for a in sched.allocations]
        else:
            report["min_adjustments"] = None
            report["status"] = f"no valid allocation in round {sched.infeasible_round}"
    _emit(dumps(report), args.out)
    return EXIT_OK


def cmd_bound_report(args) -> int:
    profile = _spec_from_args(args).resolve()
    summaries = []
    for path in args.run:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read run file {path}: {exc}") from exc
        rows = json.loads(text)["rows"] if text.lstrip().startswith("{") else read_run_csv(text)
        summary = bound_report(rows, profile, args.bound)
        summary["run"] = path
        summaries.append(summary)
    worst = max((s["ratio_float"] for s in summaries if s["ratio_float"] is not None), default=None)
    _emit(dumps({"runs": summaries, "max_ratio": worst,
                 "any_exceeded": any(s["exceeded"] for s in summaries)}), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairstream", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an online allocator and report adjustments per round")
    p.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    _add_instance_args(p)
    p.add_argument("--check", default="", help="comma list of ef,ef1,propa,eq1")
    p.add_argument("--strict", action="store_true", help="exit 2 on the first fairness violation")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gen", help="write a generated instance as JSON")
    _add_instance_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    for name, func, help_ in (("verify", cmd_verify, "forced-ownership certificates and minimum adjustments"),
                              ("oracle", cmd_oracle, "forced-ownership certificates as JSON lines")):
        p = sub.add_parser(name, help=help_)
        _add_instance_args(p)
        p.add_argument("--notion", choices=("ef1", "propa", "eq1", "ef"), default="ef1")
        p.add_argument("--rounds", help="e.g. 12..20 or 4,8,12")
        p.add_argument("--block", type=int, default=1)
        p.add_argument("--item", type=int, default=None, help="report owners of the block holding this item")
        p.add_argument("--prefix", type=int, default=None)
        p.add_argument("--order", choices=("auto", "fixed", "any"), default="auto",
                       help="agent order of blocks (auto: fixed for identical profiles)")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        p.add_argument("--out")
        if name == "verify":
            p.add_argument("--contiguous", action=argparse.BooleanOptionalAction, default=True)
            p.add_argument("--min-adjust", action="store_true", help="also compute the minimum-adjustment schedule")
        else:
            p.set_defaults(contiguous=True)
        p.set_defaults(func=func)

    p = sub.add_parser("bound-report", help="ratios of cumulative adjustments to a theoretical bound")
    p.add_argument("--run", action="append", required=True, help="run output (CSV or JSON); repeatable")
    p.add_argument("--bound", required=True, choices=sorted(BOUNDS))
    _add_instance_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(json.dumps({"error": "budget", "count": exc.count, "budget": exc.budget}), file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, UnsupportedInstance, ValueError, KeyError) as exc:
        print(f"fairstream: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

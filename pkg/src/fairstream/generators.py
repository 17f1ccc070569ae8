"""Instance constructions from the lower-bound arguments, seeded random
families, and the JSON instance format.

Random families draw from Python's ``random.Random`` (MT19937) seeded with the
integer seed; the PRNG name is written into generated files.
"""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .core import ValuationProfile

PRNG_NAME = "MT19937 (Python random.Random, integer seed)"


def gen_identical_ones(n: int, T: int) -> ValuationProfile:
    if n < 1 or T < 1:
        raise ValueError("need n >= 1 and T >= 1")
    return ValuationProfile.identical_values(n, [1] * T, declared={"binary", "goods_only"})


def gen_nonidentical_propa(n: int, T: int) -> ValuationProfile:
    """Periods of n^2 items split into n runs of n; run i of period c is worth n^(2c) to agent i only."""
    if n < 2:
        raise ValueError("need n >= 2")
    rows = []
    for i in range(1, n + 1):
        row = []
        for t in range(1, T + 1):
            c, r = divmod(t - 1, n * n)
            row.append(n ** (2 * c) if (i - 1) * n <= r < i * n else 0)
        rows.append(tuple(row))
    return ValuationProfile(tuple(rows), frozenset({"goods_only"}))


def gen_nonidentical_ef1(n: int, T: int) -> ValuationProfile:
    """Periods of 3n items split into n runs of 3; run i of period c is worth n^(2c) to agent i only."""
    if n < 2:
        raise ValueError("need n >= 2")
    rows = []
    for i in range(1, n + 1):
        row = []
        for t in range(1, T + 1):
            c, r = divmod(t - 1, 3 * n)
            row.append(n ** (2 * c) if 3 * (i - 1) <= r < 3 * i else 0)
        rows.append(tuple(row))
    return ValuationProfile(tuple(rows), frozenset({"goods_only"}))


ITEM_TYPES = {0: (1, 1), 1: (1, 0), 2: (0, 1)}


def gen_binary_two_agent(T: int) -> ValuationProfile:
    """4T + 4 binary items: 2T + 2 of type 0, two of type 1, then periods of 4x type 2 + 4x type 1."""
    if T <= 0 or T % 4:
        raise ValueError("T must be a positive multiple of 4")
    types = [0] * (2 * T + 2) + [1, 1] + ([2] * 4 + [1] * 4) * (T // 4)
    cols = [ITEM_TYPES[k] for k in types]
    return ValuationProfile((tuple(c[0] for c in cols), tuple(c[1] for c in cols)),
                            frozenset({"binary", "goods_only"}))


def gen_remark_132() -> ValuationProfile:
    return ValuationProfile.identical_values(2, [1, 3, 2], declared={"goods_only"})


def gen_random(family: str, n: int, T: int, seed: int, identical: bool = False, **params) -> ValuationProfile:
    """Seeded random profile.

    families: ``uniform`` (L, R), ``binary`` (p), ``restricted`` (p, L, R; every
    item keeps at least one interested agent), ``mixed`` (L, R with L < 0 < R
    allowed). ``identical=True`` copies agent 1's draws to everyone (uniform,
    binary, mixed).
    """
    rng = random.Random(seed)
    if n < 1 or T < 0:
        raise ValueError("need n >= 1 and T >= 0")
    if family in ("uniform", "mixed"):
        L, R = int(params.get("L", 1 if family == "uniform" else -10)), int(params.get("R", 10))
        if L > R:
            raise ValueError(f"empty range [{L}, {R}]")
        draw = lambda: rng.randint(L, R)
    elif family == "binary":
        p = float(params.get("p", 0.5))
        if not 0 < p <= 1:
            raise ValueError("p must lie in (0, 1]")
        draw = lambda: 1 if rng.random() < p else 0
    elif family == "restricted":
        p = float(params.get("p", 0.5))
        L, R = int(params.get("L", 1)), int(params.get("R", 10))
        if not 0 < p <= 1 or not 0 < L <= R:
            raise ValueError("restricted needs 0 < p <= 1 and 0 < L <= R")
        cols = []
        for _ in range(T):
            vg = rng.randint(L, R)
            while True:
                mask = [rng.random() < p for _ in range(n)]
                if any(mask):
                    break
            cols.append(tuple(vg if m else 0 for m in mask))
        rows = tuple(tuple(c[a] for c in cols) for a in range(n))
        return ValuationProfile(rows, frozenset({"restricted_additive", "goods_only"}))
    else:
        raise ValueError(f"unknown random family {family!r}")
    if identical:
        row = tuple(draw() for _ in range(T))
        rows = tuple(row for _ in range(n))
    else:
        rows = tuple(tuple(draw() for _ in range(T)) for _ in range(n))
    return ValuationProfile(rows)


GENERATORS = {
    "identical-ones": lambda p, seed: gen_identical_ones(int(p["n"]), int(p["T"])),
    "nonidentical-propa": lambda p, seed: gen_nonidentical_propa(int(p["n"]), int(p["T"])),
    "nonidentical-ef1": lambda p, seed: gen_nonidentical_ef1(int(p["n"]), int(p["T"])),
    "binary-two-agent": lambda p, seed: gen_binary_two_agent(int(p["T"])),
    "remark-132": lambda p, seed: gen_remark_132(),
    "random": lambda p, seed: gen_random(
        p.get("family", "uniform"), int(p["n"]), int(p["T"]), int(seed or 0),
        identical=str(p.get("identical", False)).lower() in ("1", "true", "yes"),
        **{k: v for k, v in p.items() if k not in ("family", "n", "T", "identical")}),
}


@dataclass
class InstanceSpec:
    """Either an explicit value matrix or a named generator with parameters and seed."""

    n: int | None = None
    items: list[list[int]] | None = None
    generator: str | None = None
    params: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None

    def resolve(self) -> ValuationProfile:
        if self.items is not None:
            profile = ValuationProfile(tuple(tuple(int(x) for x in row) for row in self.items))
            if self.n is not None and profile.n != self.n:
                raise ValueError(f"instance declares n={self.n} but lists {profile.n} agents")
            return profile
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}; choose from {sorted(GENERATORS)}")
        return GENERATORS[self.generator](self.params, self.seed)

    @classmethod
    def from_dict(cls, data: dict) -> "InstanceSpec":
        if "items" in data:
            return cls(n=data.get("n"), items=[[int(x) for x in row] for row in data["items"]])
        if "generator" in data:
            return cls(generator=data["generator"], params=dict(data.get("params", {})), seed=data.get("seed"))
        raise ValueError("instance JSON needs either 'items' or 'generator'")

    @classmethod
    def load(cls, path: str | Path) -> "InstanceSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        if self.items is not None:
            return {"n": len(self.items), "items": [[str(x) for x in row] for row in self.items]}
        return {"generator": self.generator, "params": self.params, "seed": self.seed}


def profile_to_json(profile: ValuationProfile, meta: dict | None = None) -> dict:
    """Instance JSON for a resolved profile; values as decimal strings."""
    out: dict[str, Any] = {"n": profile.n, "items": [[str(x) for x in row] for row in profile.values]}
    if meta is not None:
        out["meta"] = meta
    return out


def instance_digest(profile: ValuationProfile) -> str:
    blob = json.dumps([[str(x) for x in row] for row in profile.values], separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]

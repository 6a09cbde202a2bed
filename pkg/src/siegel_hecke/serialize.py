"""Lossless JSON forms for exact values, seeds and eigen-systems.

Exact values are strings ``"num/den"`` with an optional ``"·r^-1/2"``
suffix for the odd grade; float values are JSON numbers.
"""

from __future__ import annotations

import json
from pathlib import Path

from .eigen_core import EigenSystem, HeckeSeed, RawEigenRecord
from .graded import GradedRational, parse, to_string


def value_to_json(x):
    if isinstance(x, GradedRational):
        return to_string(x)
    return float(x)


def value_from_json(x):
    if isinstance(x, str):
        return parse(x)
    if isinstance(x, int):
        return GradedRational(x)
    return float(x)


def seed_to_json(seed: HeckeSeed) -> dict:
    return {"p": seed.p, "lam_p": value_to_json(seed.lam_p), "lam_p2": value_to_json(seed.lam_p2)}


def seed_from_json(obj: dict) -> HeckeSeed:
    return HeckeSeed(int(obj["p"]), value_from_json(obj["lam_p"]), value_from_json(obj["lam_p2"]))


def system_to_json(sys: EigenSystem) -> dict:
    out = {
        "provenance": sys.provenance,
        "seeds": [seed_to_json(sys.seeds[p]) for p in sorted(sys.seeds)],
    }
    if sys.weight is not None:
        out["weight"] = sys.weight
    if sys.records:
        out["records"] = [{"p": r.p, "n": r.n, "mu": str(r.mu), "k": r.k} for r in sys.records]
    return out


def system_from_json(obj) -> EigenSystem:
    """Accepts a system object, a bare list of seeds, or a single seed."""
    if isinstance(obj, list):
        return EigenSystem.from_seeds([seed_from_json(s) for s in obj])
    if "seeds" not in obj:
        return EigenSystem.from_seeds([seed_from_json(obj)])
    seeds = {int(s["p"]): seed_from_json(s) for s in obj["seeds"]}
    records = [RawEigenRecord(int(r["p"]), int(r["n"]), int(r["mu"]), int(r["k"])) for r in obj.get("records", [])]
    return EigenSystem(seeds, obj.get("provenance", "manual"), records, obj.get("weight"))


def load_system(path) -> EigenSystem:
    return system_from_json(json.loads(Path(path).read_text()))


def pairs_to_json(pairs) -> list:
    return [{"F": seed_to_json(f), "G": seed_to_json(g)} for f, g in pairs]


def pairs_from_json(obj) -> list[tuple[HeckeSeed, HeckeSeed]]:
    return [(seed_from_json(d["F"]), seed_from_json(d["G"])) for d in obj]

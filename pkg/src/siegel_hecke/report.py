"""Experiment reports: JSON payloads with a config echo and content hash."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any


def _default(obj):
    from .graded import GradedRational, to_string

    if isinstance(obj, GradedRational):
        return to_string(obj)
    if hasattr(obj, "tolist"):  # numpy arrays and scalars
        return obj.tolist()
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enums
        return obj.value
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_default)


def content_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


@dataclass
class ExperimentReport:
    kind: str
    config: dict[str, Any]
    results: dict[str, Any]
    anomalies: list = field(default_factory=list)

    def to_dict(self) -> dict:
        payload = {
            "kind": self.kind,
            "config": self.config,
            "results": self.results,
            "anomalies": self.anomalies,
        }
        # round-trip through JSON so numpy/graded values are normalised
        payload = json.loads(canonical_json(payload))
        payload["input_hash"] = content_hash({"kind": self.kind, "config": payload["config"]})
        return payload

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @property
    def ok(self) -> bool:
        return not self.anomalies

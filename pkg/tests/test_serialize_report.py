import json
from fractions import Fraction

import numpy as np
import pytest

from siegel_hecke.eigen_core import EigenSystem, HeckeSeed, RawEigenRecord, system_from_records
from siegel_hecke.graded import GradedRational as G
from siegel_hecke.nonvanishing import CaseTag
from siegel_hecke.report import ExperimentReport, canonical_json, content_hash
from siegel_hecke.serialize import (
    load_system,
    pairs_from_json,
    pairs_to_json,
    seed_from_json,
    seed_to_json,
    system_from_json,
    system_to_json,
    value_from_json,
    value_to_json,
)

F = Fraction


@pytest.mark.parametrize("x", [G(0), G(F(-7, 3)), G.odd(5, 2), G.odd(F(-1, 9), 6), 0.125, -3.5])
def test_value_round_trip(x):
    back = value_from_json(json.loads(json.dumps(value_to_json(x))))
    assert back == x and type(back) is type(x)


def test_integer_json_is_exact():
    assert value_from_json(3) == G(3)


def test_seed_round_trip():
    for s in (HeckeSeed(2, G.odd(1, 2), 0), HeckeSeed(7, F(1, 2), -3), HeckeSeed(5, 0.25, -1.5)):
        assert seed_from_json(json.loads(json.dumps(seed_to_json(s)))) == s


def test_system_round_trip(tmp_path):
    recs = [RawEigenRecord(2, 1, 0, 10), RawEigenRecord(2, 2, -512, 10), RawEigenRecord(3, 1, 7, 10),
            RawEigenRecord(3, 2, 11, 10)]
    sys_ = system_from_records(recs)
    obj = json.loads(json.dumps(system_to_json(sys_)))
    back = system_from_json(obj)
    assert back.seeds == sys_.seeds and back.weight == 10 and back.provenance == "ingested"
    assert back.records == sys_.records
    path = tmp_path / "s.json"
    path.write_text(json.dumps(obj))
    assert load_system(path).seeds == sys_.seeds


def test_system_from_bare_forms():
    s = HeckeSeed(3, 1, 1)
    assert system_from_json(seed_to_json(s)).seeds == {3: s}
    assert system_from_json([seed_to_json(s)]).seeds == {3: s}


def test_pairs_round_trip():
    pairs = [(HeckeSeed(3, 0, 0), HeckeSeed(3, 1, 1)), (HeckeSeed(2, 0.5, 0.0), HeckeSeed(2, G.odd(1, 2), 0))]
    assert pairs_from_json(json.loads(json.dumps(pairs_to_json(pairs)))) == pairs


def test_canonical_json_handles_extras():
    s = canonical_json({"b": np.int64(3), "a": np.array([1.5, 2.0]), "g": G.odd(1, 2), "t": CaseTag.ALL_ZERO})
    obj = json.loads(s)
    assert list(obj) == ["a", "b", "g", "t"]
    assert obj["b"] == 3 and obj["a"] == [1.5, 2.0] and value_from_json(obj["g"]) == G.odd(1, 2)
    with pytest.raises(TypeError):
        canonical_json({"x": object()})


def test_report_hash_depends_on_config_only():
    a = ExperimentReport("sweep", {"n": 10, "seed": 1}, {"histogram": {"4": 1}})
    b = ExperimentReport("sweep", {"seed": 1, "n": 10}, {"histogram": {"4": 2}}, anomalies=["x"])
    c = ExperimentReport("sweep", {"n": 11, "seed": 1}, {})
    assert a.to_dict()["input_hash"] == b.to_dict()["input_hash"] != c.to_dict()["input_hash"]
    assert a.to_dict()["input_hash"] == content_hash({"kind": "sweep", "config": {"n": 10, "seed": 1}})
    assert a.ok and not b.ok


def test_report_config_echo_and_json():
    rep = ExperimentReport("sums", {"x": [10, 100]}, {"S": np.array([1.0, 2.0])})
    d = json.loads(rep.to_json())
    assert d["config"] == {"x": [10, 100]} and d["results"]["S"] == [1.0, 2.0]
    assert d["kind"] == "sums" and d["anomalies"] == []


def test_constant_system_serialises():
    sys_ = EigenSystem.constant(0, 0, [2, 3, 5])
    assert [s["lam_p"] for s in system_to_json(sys_)["seeds"]] == [value_to_json(G(0))] * 3

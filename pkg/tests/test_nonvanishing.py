import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siegel_hecke.eigen_core import HeckeSeed, SatakePair, lambda_prime_power, lambda_prime_powers, satake_to_seed
from siegel_hecke.graded import GradedRational as G
from siegel_hecke.nonvanishing import (
    CaseTag,
    SweepConfig,
    classify_case,
    f_family,
    f_no_rational_root,
    first_joint_nonvanishing,
    replay_pairs,
    sweep_nonvanishing,
    vanishing_pattern_scan,
)

F = Fraction


def test_f_family_examples():
    assert f_family(0).coeffs == (-1,)
    assert f_family(1).coeffs == (0, -1)
    assert f_family(2).coeffs == (1, 0, -1)
    assert f_family(3).coeffs == (0, 2, 0, -1)


def test_f_family_recursion():
    for n in range(1, 30):
        x = F(2, 7)
        assert f_family(n + 1)(x) == x * f_family(n)(x) - f_family(n - 1)(x)


def test_f_values():
    assert f_family(2)(F(1, 2)) == F(3, 4)
    for p in (2, 3, 5, 101):
        assert f_no_rational_root(1, F(1, p)) == F(-1, p)
    with pytest.raises(ValueError):
        f_no_rational_root(3, F(2))
    assert lambda_prime_power(HeckeSeed(2, 0, 0), 8) == G(F(3, 4))


def test_scan_zero_lam_p_seed():
    rep = vanishing_pattern_scan(HeckeSeed(5, 0, 3), 64)
    assert rep.odd_all_zero and rep.lam_p_zero and rep.ok
    rep = vanishing_pattern_scan(HeckeSeed(3, 0, 0), 64)
    assert set(rep.zeros) == set(range(1, 65, 2)) | {2}
    assert rep.runs_of_four == [] and rep.ok


def test_scan_generic_satake():
    for t1, t2 in [(0.3, 1.9), (1.0, 2.5), (0.01, 3.1)]:
        rep = vanishing_pattern_scan(satake_to_seed(SatakePair(t1, t2), 7, exact=False), 100)
        assert rep.ok and not rep.lam_p_zero and rep.odd_runs == [] and rep.even_runs == []


def test_scan_window_cap():
    with pytest.raises(ValueError):
        vanishing_pattern_scan(HeckeSeed(2, 0, 0), 201)


def test_classify_examples():
    z = HeckeSeed(3, 0, 0)
    assert classify_case(z, z)[0] is CaseTag.ALL_ZERO
    assert classify_case(HeckeSeed(3, 0, 2), HeckeSeed(3, 1, 0))[0] is CaseTag.MIXED_F2_G1
    tag, swapped = classify_case(HeckeSeed(3, 1, 0), HeckeSeed(3, 0, 2))
    assert tag is CaseTag.MIXED_F2_G1 and swapped
    assert classify_case(HeckeSeed(2, 0, 1), HeckeSeed(2, G.odd(1, 2), 0))[0] is CaseTag.P2_BOUNDARY
    assert classify_case(z, HeckeSeed(3, 0, 5))[0] is CaseTag.F_ZERO_G2_NONZERO
    assert classify_case(z, HeckeSeed(3, 2, 5))[0] is CaseTag.F_ZERO_G1_NONZERO
    assert classify_case(HeckeSeed(3, 1, 1), HeckeSeed(3, 1, 1))[0] is CaseTag.TRIVIAL


def test_witness_examples():
    for p in (2, 3, 5):
        w = first_joint_nonvanishing(HeckeSeed(p, 0, 0), HeckeSeed(p, 0, 0))
        assert (w.n, w.value, w.exact) == (4, G(1), True)
    w = first_joint_nonvanishing(HeckeSeed(3, 0, 0), HeckeSeed(3, 1, 1))
    assert w.n == 4 and w.value == G(F(-8, 3))


def test_witness_p2_boundary():
    boundary = HeckeSeed(2, G.odd(1, 2), 0)
    assert lambda_prime_power(boundary, 8) == G(-1)
    for b in (F(1), F(-3, 2), F(5, 7)):
        f = HeckeSeed(2, 0, b)
        lf = lambda_prime_powers(f, 8)
        assert lf[4] != 0
        w = first_joint_nonvanishing(f, boundary)
        assert w.case is CaseTag.P2_BOUNDARY
        if lf[8] != 0:
            assert w.n == 8 and w.value == -lf[8]
        assert w.within_case_bound


def test_float_witness_escalates_to_exact():
    # a float seed that is exactly the zero seed must still give n = 4
    w = first_joint_nonvanishing(HeckeSeed(3, 0.0, 0.0), HeckeSeed(3, 0.0, 0.0))
    assert w.n == 4 and w.exact


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from([2, 3, 5, 7, 97]),
    st.floats(0, math.pi), st.floats(0, math.pi), st.floats(0, math.pi), st.floats(0, math.pi),
)
def test_index_at_most_14(p, a, b, c, d):
    w = first_joint_nonvanishing(
        satake_to_seed(SatakePair(a, b), p, exact=False), satake_to_seed(SatakePair(c, d), p, exact=False)
    )
    assert w.n is not None and 1 <= w.n <= 14


def test_sweep_empty_and_deterministic():
    rep = sweep_nonvanishing(SweepConfig(), 0)
    assert rep.results["histogram"] == {} and rep.results["max_index"] is None and rep.ok
    a = sweep_nonvanishing(SweepConfig(mode="free"), 3000, rng_seed=4)
    b = sweep_nonvanishing(SweepConfig(mode="free"), 3000, rng_seed=4)
    assert a.to_dict() == b.to_dict()
    assert a.results["max_index"] <= 14


def test_sweep_injected_all_zero_mass_at_four():
    for mode in ("satake", "free"):
        rep = sweep_nonvanishing(SweepConfig(mode=mode, inject_all_zero=1.0), 500, rng_seed=1)
        assert rep.results["histogram"] == {"4": 500}
        assert rep.results["cases"] == {"ALL_ZERO": 500}
    rep = sweep_nonvanishing(SweepConfig(inject_all_zero=0.3), 2000, rng_seed=1)
    assert rep.results["histogram"]["4"] >= 500


def test_sweep_worker_independent():
    cfg = SweepConfig(mode="satake")
    a = sweep_nonvanishing(cfg, 25_000, rng_seed=3, workers=1)
    b = sweep_nonvanishing(cfg, 25_000, rng_seed=3, workers=2)
    assert a.results == b.results


def test_replay_pairs():
    pairs = [(HeckeSeed(3, 0, 0), HeckeSeed(3, 1, 1)), (HeckeSeed(2, 0, 1), HeckeSeed(2, G.odd(1, 2), 0))]
    rep = replay_pairs(pairs)
    assert [r["n"] for r in rep.results["pairs"]] == [4, first_joint_nonvanishing(*pairs[1]).n]
    assert rep.ok

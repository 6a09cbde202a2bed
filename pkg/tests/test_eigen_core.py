import math
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siegel_hecke.eigen_core import (
    EigenSystem,
    HeckeSeed,
    IngestError,
    MissingPrimeError,
    RawEigenRecord,
    SatakePair,
    SeedError,
    denormalize,
    extend_multiplicative,
    lambda_prime_power,
    lambda_prime_powers,
    normalize,
    read_records,
    record_consistency,
    satake_to_seed,
    spin_poly,
    system_from_records,
    validate_seed,
)
from siegel_hecke.graded import GradedRational as G
from siegel_hecke.primes import primes_upto

F = Fraction
SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 97]
angles = st.floats(min_value=0.0, max_value=math.pi)


def series_oracle(seed: HeckeSeed, nmax: int) -> list:
    """Coefficients of (1 - T^2/p) / prod(1 - alpha_i T) from the Satake
    roots, by multiplying geometric series in complex floats."""
    u, v = (complex(z) for z in seed.satake_uv())
    roots = []
    for w in (u, v):
        d = (w * w - 4) ** 0.5
        roots += [(w + d) / 2, (w - d) / 2]
    s = np.zeros(nmax + 1, dtype=complex)
    s[0] = 1
    for r in roots:
        geo = r ** np.arange(nmax + 1)
        s = np.convolve(s, geo)[: nmax + 1]
    out = s.copy()
    out[2:] -= s[:-2] / seed.p
    return out.real.tolist()


# -- spin polynomial and recurrence ----------------------------------------------


def test_spin_poly_examples():
    assert spin_poly(HeckeSeed(2, 0, 0)) == [G(1), G(0), G(F(-1, 2)), G(0), G(1)]
    assert spin_poly(HeckeSeed(5, 1, 1)) == [G(1), G(-1), G(F(-1, 5)), G(-1), G(1)]
    s = satake_to_seed(SatakePair(0.0, 0.0), 7)
    assert s.exact
    assert spin_poly(s) == [G(1), G(-4), G(6), G(-4), G(1)]


def test_recurrence_examples():
    for p in SMALL_PRIMES:
        assert lambda_prime_power(HeckeSeed(p, 0, 0), 4) == G(-1)
        assert lambda_prime_power(HeckeSeed(p, 0, 0), 6) == G(F(-1, p))
    vals = lambda_prime_powers(HeckeSeed(3, 1, 1), 4)
    assert vals[3] == G(F(7, 3))
    assert vals[4] == G(F(8, 3))


def test_recurrence_against_root_series():
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = int(rng.choice(SMALL_PRIMES))
        s = satake_to_seed(SatakePair(*rng.uniform(0, math.pi, 2)), p, exact=False)
        assert np.allclose(lambda_prime_powers(s, 30), series_oracle(s, 30), rtol=1e-9, atol=1e-9)


def test_satake_examples():
    s = satake_to_seed(SatakePair(0.0, 0.0), 5)
    assert s.lam_p == G(4) and s.lam_p2 == G(10 - F(1, 5))
    for p in (2, 3, 101):
        s = satake_to_seed(SatakePair(math.pi, 0.0), p)
        assert s.lam_p == G(0) and s.lam_p2 == G(2 - F(1, p))
    s = satake_to_seed(SatakePair(math.pi / 2, math.pi / 2), 2)
    assert s.lam_p == G(0) and s.lam_p2 == G(F(-5, 2))


def test_satake_exact_refused_for_generic_angles():
    with pytest.raises(SeedError):
        satake_to_seed(SatakePair(0.3, 0.1), 5, exact=True)
    with pytest.raises(SeedError):
        SatakePair(4.0, 0.0)


def test_seed_validation():
    with pytest.raises(SeedError):
        HeckeSeed(4, 0, 0)
    with pytest.raises(SeedError):
        HeckeSeed(3, G.odd(1, 2), 0)
    with pytest.raises(SeedError):
        HeckeSeed(2, 0, G.odd(1, 2))
    with pytest.raises(SeedError):
        validate_seed(HeckeSeed(5, 5, 0), "satake")
    validate_seed(satake_to_seed(SatakePair(0.4, 2.0), 5), "satake")
    # free mode accepts the p = 2 boundary seed
    validate_seed(HeckeSeed(2, G.odd(1, 2), 0), "free")


def test_to_exact_is_lossless():
    s = satake_to_seed(SatakePair(0.4, 2.0), 5, exact=False)
    e = s.to_exact()
    assert e.exact and float(e.lam_p) == s.lam_p and float(e.lam_p2) == s.lam_p2


@settings(max_examples=60, deadline=None)
@given(angles, angles, st.sampled_from(SMALL_PRIMES))
def test_satake_bound(t1, t2, p):
    s = satake_to_seed(SatakePair(t1, t2), p, exact=False)
    vals = lambda_prime_powers(s, 64)
    for n, v in enumerate(vals):
        bound = comb(n + 3, 3) + comb(n + 1, 3) / p
        assert abs(v) <= bound * (1 + 1e-9)


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(SMALL_PRIMES),
    st.fractions(min_value=-4, max_value=4, max_denominator=9),
    st.fractions(min_value=-14, max_value=14, max_denominator=9),
    st.booleans(),
)
def test_parity_grading(p, a, b, odd):
    lam_p = G.odd(a, p) if odd else G(a)
    vals = lambda_prime_powers(HeckeSeed(p, lam_p, b), 64)
    for n, v in enumerate(vals):
        if v != 0 and odd:
            assert v.parity == ("odd" if n % 2 else "even")
        elif v != 0:
            assert v.parity == "even"


# -- raw records -----------------------------------------------------------------


def test_normalize_examples():
    assert normalize(RawEigenRecord(2, 2, 1024, 10)) == G(F(1, 128))
    x = normalize(RawEigenRecord(2, 1, 256, 10))
    assert x == G.odd(1, 2) and x.parity == "odd"
    assert normalize(RawEigenRecord(3, 1, 0, 20)) == G(0)


@given(
    st.sampled_from(SMALL_PRIMES),
    st.integers(min_value=1, max_value=6),
    st.integers(min_value=-(10**12), max_value=10**12),
    st.integers(min_value=4, max_value=30),
)
def test_normalize_denormalize_round_trip(p, n, mu, k):
    rec = RawEigenRecord(p, n, mu, k)
    assert denormalize(normalize(rec), p, n, k) == rec


def test_record_validation():
    with pytest.raises(IngestError):
        RawEigenRecord(2, 1, 1, 3)
    with pytest.raises(IngestError):
        RawEigenRecord(6, 1, 1, 10)


def test_read_records(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("p,n,mu,k\n2,1,0,10\n2,2,-512,10\n3,1,0,10\n")
    recs = read_records(path)
    assert len(recs) == 3
    sys_ = system_from_records(recs)
    assert sys_.provenance == "ingested" and sys_.weight == 10
    assert sys_.primes() == [2]  # 3 has no n=2 record
    assert sys_[2].lam_p == G(0)


def test_read_records_duplicate_row(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("p,n,mu,k\n2,1,0,10\n3,1,1,10\n2,1,5,10\n")
    with pytest.raises(IngestError) as exc:
        read_records(path)
    assert exc.value.row == 4


def test_read_records_bad_header_and_field(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("p,n,mu\n")
    with pytest.raises(IngestError):
        read_records(path)
    path.write_text("p,n,mu,k\n2,1,x,10\n")
    with pytest.raises(IngestError) as exc:
        read_records(path)
    assert exc.value.row == 2


def test_record_consistency_flags_bad_higher_power(tmp_path):
    # zero seed at p=2, k=10: lambda(2^4) = -1 means mu = -2^(4*17/2) = -2^34
    good = [RawEigenRecord(2, 1, 0, 10), RawEigenRecord(2, 2, 0, 10), RawEigenRecord(2, 4, -(2**34), 10)]
    assert record_consistency(system_from_records(good)) == []
    bad = good[:2] + [RawEigenRecord(2, 4, 2**34, 10)]
    assert record_consistency(system_from_records(bad)) == [(2, 4)]


# -- systems and tables -----------------------------------------------------------


def test_extend_multiplicative_examples():
    sys_ = EigenSystem.from_seeds(HeckeSeed(p, p % 5, 1) for p in primes_upto(50))
    t = extend_multiplicative(sys_, 50)
    assert t[1] == G(1)
    assert t[6] == t[2] * t[3]
    assert t[45] == t[9] * t[5]
    zero = EigenSystem.constant(0, 0, primes_upto(1296))
    assert extend_multiplicative(zero, 1296)[1296] == G(1)  # 2^4 3^4


def test_extend_multiplicative_float_matches_exact():
    rng = np.random.default_rng(2)
    seeds = [satake_to_seed(SatakePair(*rng.uniform(0, math.pi, 2)), p, exact=False) for p in primes_upto(2000)]
    sys_ = EigenSystem.from_seeds(seeds)
    tf = extend_multiplicative(sys_, 2000)
    te = extend_multiplicative(sys_, 2000, "exact")
    assert not tf.exact and te.exact
    assert np.allclose(tf.as_float(), te.as_float(), rtol=1e-12, atol=1e-12)


def test_missing_prime_reported():
    sys_ = EigenSystem.constant(0, 0, [2, 3, 7])
    with pytest.raises(MissingPrimeError) as exc:
        extend_multiplicative(sys_, 10)
    assert exc.value.p == 5
    with pytest.raises(MissingPrimeError):
        sys_[5]


def test_table_index_bounds():
    t = extend_multiplicative(EigenSystem.constant(0, 0, [2, 3]), 4)
    with pytest.raises(IndexError):
        t[5]
    with pytest.raises(IndexError):
        t[0]

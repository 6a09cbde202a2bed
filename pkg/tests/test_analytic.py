import math
from fractions import Fraction
from math import comb

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siegel_hecke.analytic import (
    DirichletSeries,
    RademacherParams,
    archimedean_ratio,
    coeffs_g,
    coeffs_LFG,
    coeffs_rankin,
    dirichlet_convolve,
    factorization_check,
    g_bound_check,
    gamma_factors,
    identity_check_per_prime,
    partial_sum_experiment,
    rademacher_bound,
    rankin_factors,
    sums_to_csv,
)
from siegel_hecke.eigen_core import (
    EigenSystem,
    EigenTable,
    HeckeSeed,
    MissingPrimeError,
    SatakePair,
    extend_multiplicative,
    satake_to_seed,
)
from siegel_hecke.graded import GradedRational as G
from siegel_hecke.primes import primes_upto

F = Fraction


def random_rational_system(rng, N):
    return EigenSystem.from_seeds(
        HeckeSeed(p, F(int(rng.integers(-8, 9)), int(rng.integers(1, 4))), F(int(rng.integers(-20, 21)), int(rng.integers(1, 4))))
        for p in primes_upto(N)
    )


def satake_system(rng, N):
    return EigenSystem.from_seeds(
        satake_to_seed(SatakePair(*rng.uniform(0, math.pi, 2)), p, exact=False) for p in primes_upto(N)
    )


# -- Dirichlet coefficients ---------------------------------------------------------


def test_lfg_examples():
    rng = np.random.default_rng(1)
    sF = random_rational_system(rng, 100)
    t = extend_multiplicative(sF, 100)
    a = coeffs_LFG(t, t)
    assert a[1] == G(1)
    assert all(a[n] >= 0 for n in range(1, 101))
    z = extend_multiplicative(EigenSystem.constant(0, 0, primes_upto(81)), 81)
    zz = coeffs_LFG(z, z)
    assert zz[16] == G(1) and zz[81] == G(1)
    with pytest.raises(ValueError):
        coeffs_LFG(t, z)


def test_rankin_coefficients_at_primes():
    rng = np.random.default_rng(2)
    sF, sG = random_rational_system(rng, 60), random_rational_system(rng, 60)
    r = coeffs_rankin(rankin_factors(sF, sG, 60), 60)
    assert r[1] == G(1)
    for p in primes_upto(60):
        assert r[p] == sF[p].lam_p * sG[p].lam_p


def test_rankin_degenerate_pair_is_complete_homogeneous():
    # all 16 root products equal 1: coefficient at p^k is C(k+15, 15)
    sys_ = EigenSystem.from_seeds(satake_to_seed(SatakePair(0.0, 0.0), p) for p in primes_upto(64))
    r = coeffs_rankin(rankin_factors(sys_, sys_, 64), 64)
    for k in range(7):
        assert r[2**k] == G(comb(k + 15, 15))
    assert r[3] == G(16) and r[6] == G(256)


def test_rankin_missing_prime():
    sys_ = EigenSystem.constant(0, 0, [2, 3])
    with pytest.raises(MissingPrimeError):
        coeffs_rankin(rankin_factors(sys_, sys_, 3), 10)


def test_g_coefficients_vanish_at_primes():
    rng = np.random.default_rng(3)
    sF, sG = random_rational_system(rng, 50), random_rational_system(rng, 50)
    g = coeffs_g(rankin_factors(sF, sG, 50), 50)
    assert g[1] == G(1)
    assert all(g[p] == 0 for p in primes_upto(50))


def test_dirichlet_convolve_exact_and_float():
    one = DirichletSeries([G(0)] + [G(1)] * 30)
    d = dirichlet_convolve(one, one)
    assert d[12] == G(6) and d[30] == G(8)
    df = dirichlet_convolve(DirichletSeries(one.as_float()), DirichletSeries(one.as_float()))
    assert df[12] == 6.0


def test_identity_per_prime():
    z = HeckeSeed(5, 0, 0)
    assert identity_check_per_prime(z, z) == 0
    rng = np.random.default_rng(4)
    for _ in range(30):
        p = int(rng.choice([2, 3, 5, 7, 97]))
        A, B = (satake_to_seed(SatakePair(*rng.uniform(0, math.pi, 2)), p, exact=False) for _ in range(2))
        assert identity_check_per_prime(A, B) <= 1e-9
        assert identity_check_per_prime(A, A) <= 1e-9


def test_factorization_check_exact_and_float():
    rng = np.random.default_rng(5)
    sF, sG = random_rational_system(rng, 300), random_rational_system(rng, 300)
    res = factorization_check(sF, sG, 300)
    assert res["exact"] and res["mismatches"] == []
    fF, fG = satake_system(rng, 2000), satake_system(rng, 2000)
    res = factorization_check(fF, fG, 2000, "float")
    assert not res["exact"] and res["max_residual"] <= 1e-9


# -- g(sigma) monitor ------------------------------------------------------------------


def test_g_bound_check():
    rng = np.random.default_rng(6)
    sF, sG = satake_system(rng, 100), satake_system(rng, 100)
    fac = rankin_factors(sF, sG, 100)
    out = g_bound_check(fac, 2.0)
    assert math.isfinite(out["estimate"]) and out["estimate"] > 0
    assert out["bound"] == pytest.approx(2.0**16 * 1.5**-16)
    with pytest.raises(ValueError):
        g_bound_check(fac, 0.5)
    bounds = [g_bound_check(fac, s)["bound"] for s in (0.9, 0.7, 0.6, 0.55)]
    assert bounds == sorted(bounds)
    near = g_bound_check(fac, 0.5001)
    assert math.isfinite(near["log_bound"]) and isinstance(near["violation"], bool)


# -- gamma factors ---------------------------------------------------------------------


def test_gamma_examples():
    g = gamma_factors(20, 10)
    assert g.c_shifts == [27, 10, 19, 18, 9, 8, 1] and g.r_shifts == [0, 1] and len(g) == 9
    g = gamma_factors(20, 20)
    assert g.c_shifts == [37, 19, 19, 18, 18, 1] and g.r_shifts == [0, 0, 1, 1]
    with pytest.raises(ValueError):
        gamma_factors(10, 20)
    with pytest.raises(ValueError):
        gamma_factors(3, 3)


def _mp_log_abs(entries, s):
    total = mpmath.mpf(0)
    for kind, mu in entries:
        z = s + mu
        if kind == "C":
            total += mpmath.log(2) - z.real * mpmath.log(2 * mpmath.pi) + mpmath.log(abs(mpmath.gamma(z)))
        else:
            total += -(z.real / 2) * mpmath.log(mpmath.pi) + mpmath.log(abs(mpmath.gamma(z / 2)))
    return total


@pytest.mark.parametrize("k1,k2,c,t", [(20, 10, 1.25, 10.0), (12, 12, 1.05, -3.0), (40, 4, 1.45, 50.0)])
def test_archimedean_ratio_against_mpmath(k1, k2, c, t):
    mpmath.mp.dps = 30
    g = gamma_factors(k1, k2)
    s = mpmath.mpc(c, t)
    want = float(mpmath.exp(_mp_log_abs(g.entries, s) - _mp_log_abs(g.entries, 1 - s)))
    got, bound = archimedean_ratio(k1, k2, c, t)
    assert got == pytest.approx(want, rel=1e-10)
    assert bound == pytest.approx(k1 ** (6 * (2 * c - 1)) * abs(1 + 1j * t) ** (8 * (2 * c - 1)))


def test_archimedean_ratio_even_and_vectorised():
    ts = np.linspace(-50, 50, 41)
    r, b = archimedean_ratio(24, 12, 1.3, ts)
    assert np.allclose(r, r[::-1], rtol=1e-12)
    assert np.allclose(b, b[::-1], rtol=1e-12)
    assert r[5] == pytest.approx(archimedean_ratio(24, 12, 1.3, float(ts[5]))[0])
    with pytest.raises(ValueError):
        archimedean_ratio(24, 12, 1.5, 0.0)


# -- Rademacher interpolation ------------------------------------------------------------

PARAMS = RademacherParams(a=-0.5, b=1.5, E=3.0, F=2.0, P=1.0, alpha=4.0, beta=1.0)


def test_rademacher_edges():
    s = complex(-0.5, 7.0)
    assert rademacher_bound(PARAMS, s) == pytest.approx(3.0 * abs(1 + s) ** 4)
    s = complex(1.5, 7.0)
    assert rademacher_bound(PARAMS, s) == pytest.approx(2.0 * abs(1 + s) ** 1)
    s = complex(0.5, 7.0)
    mid = math.sqrt(3.0 * abs(1 + s) ** 4 * 2.0 * abs(1 + s))
    assert rademacher_bound(PARAMS, s) == pytest.approx(mid)


def test_rademacher_invariants():
    with pytest.raises(ValueError):
        RademacherParams(a=1, b=0, E=1, F=1, P=1, alpha=1, beta=0)
    with pytest.raises(ValueError):
        RademacherParams(a=-2, b=1, E=1, F=1, P=1, alpha=1, beta=0)
    with pytest.raises(ValueError):
        RademacherParams(a=0, b=1, E=1, F=1, P=1, alpha=0, beta=1)
    with pytest.raises(ValueError):
        rademacher_bound(PARAMS, complex(2.0, 0))


@settings(max_examples=100, deadline=None)
@given(st.floats(-0.5, 1.5), st.floats(-30, 30))
def test_rademacher_weighted_geometric_mean(sigma, t):
    """At each s the bound is the geometric mean of the two edge majorants
    E|P+s|^alpha and F|P+s|^beta with weights (b-sigma)/(b-a), (sigma-a)/(b-a);
    so it is log-affine in sigma once |P+s| is frozen and lies between them."""
    s = complex(sigma, t)
    left = math.log(3.0) + 4.0 * math.log(abs(1 + s))
    right = math.log(2.0) + 1.0 * math.log(abs(1 + s))
    w = (sigma + 0.5) / 2.0
    got = math.log(rademacher_bound(PARAMS, s))
    assert got == pytest.approx((1 - w) * left + w * right, abs=1e-12)
    assert min(left, right) - 1e-12 <= got <= max(left, right) + 1e-12


def test_rademacher_not_log_convex_at_small_t():
    # log|P+s| is concave in sigma at t = 0, so log-convexity fails there
    f = lambda x: math.log(rademacher_bound(PARAMS, complex(x, 0.0)))  # noqa: E731
    assert f(0.5) > (f(0.0) + f(1.0)) / 2


# -- partial sums --------------------------------------------------------------------------


def test_partial_sums_small():
    vals = np.array([0.0, 1.0, -1.0, 2.0, 0.5])
    t = EigenTable(4, vals, False)
    rep = partial_sum_experiment(t, t, [1, 2, 4])
    assert rep.results["S"] == [1.0, 2.0, 6.25]
    assert "c_hat" in rep.results
    assert sums_to_csv(rep).splitlines() == ["x,S", "1,1.0", "2,2.0", "4,6.25"]
    with pytest.raises(ValueError):
        partial_sum_experiment(t, t, [5])
    empty = partial_sum_experiment(t, t, [])
    assert empty.results["S"] == [] and empty.results["slope"] is None


def test_partial_sums_linear_growth_for_constant_table():
    t = EigenTable(1000, np.ones(1001), False)
    rep = partial_sum_experiment(t, t, [10, 100, 1000])
    assert rep.results["slope"] == pytest.approx(1.0)
    assert rep.results["c_hat"] == pytest.approx(1.0)

"""Dirichlet series for L(F,G;s), the factorization L(F,G;s) = g(s) L(FxG,s),
archimedean gamma factors, convexity interpolation and partial-sum fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.special import loggamma

from . import kernels
from .eigen_core import (
    EigenSystem,
    EigenTable,
    HeckeSeed,
    MissingPrimeError,
    _max_exponent,
    extend_multiplicative,
    lambda_prime_powers,
    multiplicative_from_powers,
)
from .gf_algebra import LocalRankinFactor, local_rankin_factor, poly_mul, series_coeffs, RationalGF
from .graded import ONE, ZERO, is_exact
from .primes import primes_upto
from .report import ExperimentReport


@dataclass
class DirichletSeries:
    """Coefficients a(1..N); ``coeffs[0]`` is unused."""

    coeffs: list | np.ndarray
    label: str = ""

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    @property
    def exact(self) -> bool:
        return not isinstance(self.coeffs, np.ndarray)

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def as_float(self) -> np.ndarray:
        if isinstance(self.coeffs, np.ndarray):
            return self.coeffs
        return np.array([0.0] + [float(c) for c in self.coeffs[1:]])


def coeffs_LFG(tableF: EigenTable, tableG: EigenTable) -> DirichletSeries:
    """a(n) = lambda_F(n) lambda_G(n)."""
    if tableF.N != tableG.N:
        raise ValueError(f"cutoff mismatch: {tableF.N} vs {tableG.N}")
    if tableF.exact and tableG.exact:
        vals = [ZERO] + [tableF.values[n] * tableG.values[n] for n in range(1, tableF.N + 1)]
        return DirichletSeries(vals, "L(F,G)")
    return DirichletSeries(tableF.as_float() * tableG.as_float(), "L(F,G)")


def rankin_factors(sysF: EigenSystem, sysG: EigenSystem, P: int) -> dict[int, LocalRankinFactor]:
    """Local Rankin-Selberg data for every prime p <= P."""
    out = {}
    for p in primes_upto(P):
        out[p] = local_rankin_factor(sysF[p], sysG[p])
    return out


def _series_from_primes(powers: dict[int, list], N: int, exact: bool) -> DirichletSeries:
    if exact:
        return DirichletSeries(multiplicative_from_powers(powers, N))
    primes = sorted(p for p in powers if p <= N)
    if not primes:
        vals = np.zeros(N + 1)
        if N >= 1:
            vals[1] = 1.0
        return DirichletSeries(vals)
    kmax = max(_max_exponent(2, N), 1)
    pp = np.zeros((len(primes), kmax + 1))
    for i, p in enumerate(primes):
        row = [float(x) for x in powers[p][: kmax + 1]]
        pp[i, : len(row)] = row
    return DirichletSeries(kernels.multiplicative_table(N, np.array(primes, dtype=np.int64), pp))


def coeffs_rankin(factors: Mapping[int, LocalRankinFactor], N: int, as_float: bool = False) -> DirichletSeries:
    """Coefficients of prod_p prod_{i,j} (1 - a_i b_j p^-s)^-1 for n <= N.

    ``as_float`` rounds exact local data once, per prime power.
    """
    powers = {}
    exact = not as_float
    for p in primes_upto(N):
        if p not in factors:
            raise MissingPrimeError(p)
        f = factors[p]
        exact = exact and f.exact
        one = ONE if f.exact else 1.0
        powers[p] = series_coeffs(RationalGF([one], f.den), _max_exponent(p, N))
    s = _series_from_primes(powers, N, exact)
    s.label = "L(FxG)"
    return s


def coeffs_g(factors: Mapping[int, LocalRankinFactor], N: int, as_float: bool = False) -> DirichletSeries:
    """Coefficients of g(s) = prod_p g_p(p^-s) for n <= N."""
    powers = {}
    exact = not as_float
    for p in primes_upto(N):
        if p not in factors:
            raise MissingPrimeError(p)
        f = factors[p]
        exact = exact and f.exact
        powers[p] = list(f.gp)
    s = _series_from_primes(powers, N, exact)
    s.label = "g"
    return s


def dirichlet_convolve(a: DirichletSeries, b: DirichletSeries, label: str = "") -> DirichletSeries:
    if a.N != b.N:
        raise ValueError("length mismatch")
    if a.exact and b.exact:
        N = a.N
        out = [ZERO] * (N + 1)
        for d in range(1, N + 1):
            ad = a.coeffs[d]
            if ad == 0:
                continue
            for m in range(1, N // d + 1):
                bm = b.coeffs[m]
                if bm != 0:
                    out[d * m] = out[d * m] + ad * bm
        return DirichletSeries(out, label)
    return DirichletSeries(kernels.dirichlet_convolve(a.as_float(), b.as_float()), label)


def identity_check_per_prime(seedF: HeckeSeed, seedG: HeckeSeed, depth: int = 40):
    """max_n<=depth |[T^n] (sum lambda_F lambda_G T^n) prod(1 - a_i b_j T) - g_p|.

    The left side uses the recurrence, the right side the Hadamard route.
    Returns an exact zero (GradedRational) or a float.  For float seeds each
    difference is divided by max(1, sum_k |lambda lambda(p^(n-k))| |den_k|):
    near-degenerate seeds have convolution terms around 1e8, so binary64
    cannot reach an absolute 1e-9 however the data are formed.
    """
    f = local_rankin_factor(seedF, seedG)
    lf = lambda_prime_powers(seedF, depth)
    lg = lambda_prime_powers(seedG, depth)
    prod = [x * y for x, y in zip(lf, lg)]
    lhs = poly_mul(prod, list(f.den), limit=depth)
    gp = list(f.gp) + [ZERO if f.exact else 0.0] * (depth + 1 - len(f.gp))
    diffs = [x - y for x, y in zip(lhs, gp)]
    if f.exact and all(is_exact(d) for d in diffs):
        nonzero = [d for d in diffs if d != 0]
        return max(nonzero, key=lambda d: abs(float(d))) if nonzero else ZERO
    pa = np.abs(np.array([float(x) for x in prod]))
    da = np.abs(np.array([float(x) for x in f.den]))
    scale = np.maximum(np.convolve(pa, da)[: depth + 1], 1.0)
    return float(np.max(np.abs(np.array([float(d) for d in diffs])) / scale))


def factorization_check(sysF: EigenSystem, sysG: EigenSystem, N: int, mode: str | None = None) -> dict:
    """Compare L(F,G) coefficients with g * L(FxG) for all n <= N.

    In float mode the left side runs through the float recurrence; the
    local Rankin data on the right is built from the lossless rational
    images of the same seeds and rounded once, so the residual measures
    the float pipeline rather than the conditioning of g_p.
    """
    tF = extend_multiplicative(sysF, N, mode)
    tG = extend_multiplicative(sysG, N, mode)
    lhs = coeffs_LFG(tF, tG)
    as_float = not lhs.exact
    factors = {p: local_rankin_factor(sysF[p].to_exact(), sysG[p].to_exact()) for p in primes_upto(N)}
    g = coeffs_g(factors, N, as_float)
    r = coeffs_rankin(factors, N, as_float)
    rhs = dirichlet_convolve(g, r, "g*L(FxG)")
    if lhs.exact and rhs.exact:
        mismatches = [n for n in range(1, N + 1) if lhs[n] != rhs[n]]
        return {"N": N, "exact": True, "mismatches": mismatches, "max_residual": 0.0 if not mismatches else math.inf}
    diff = np.abs(lhs.as_float()[1:] - rhs.as_float()[1:])
    return {"N": N, "exact": False, "mismatches": [], "max_residual": float(diff.max()) if N else 0.0}


def g_bound_check(factors: Mapping[int, LocalRankinFactor], sigma: float, A: float = 16.0, C: float = 1.0) -> dict:
    """Truncated |g(sigma)| against sigma^A (sigma - 1/2)^-A.

    The tail over p > P is estimated from the largest |coefficient| M of the
    supplied g_p (linear terms vanish):  |log tail| <= M P^(1-2s) / ((2s-1)(1-P^-s)).
    """
    if sigma <= 0.5:
        raise ValueError("sigma must exceed 1/2")
    log_val = 0.0
    M = 0.0
    for p, f in factors.items():
        x = p ** (-sigma)
        coeffs = [float(c) for c in f.gp]
        val = sum(c * x**k for k, c in enumerate(coeffs))
        log_val += math.log(abs(val)) if val != 0 else -math.inf
        if len(coeffs) > 2:
            M = max(M, max(abs(c) for c in coeffs[2:]))
    P = max(factors) if factors else 1
    tail = M * P ** (1 - 2 * sigma) / ((2 * sigma - 1) * (1 - P ** (-sigma))) if factors else math.inf
    # compared in log space: both sides overflow binary64 as sigma -> 1/2
    log_bound = A * (math.log(sigma) - math.log(sigma - 0.5))
    log_upper = log_val + tail
    return {
        "sigma": sigma,
        "estimate": _safe_exp(log_val),
        "log_estimate": log_val,
        "log_tail": tail,
        "upper": _safe_exp(log_upper),
        "bound": _safe_exp(log_bound),
        "log_bound": log_bound,
        "violation": log_upper > math.log(C) + log_bound,
    }


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


# -- gamma factors --------------------------------------------------------------


@dataclass(frozen=True)
class GammaFactorList:
    """Entries (kind, shift); R: pi^(-s/2) Gamma(s/2), C: 2 (2 pi)^(-s) Gamma(s)."""

    entries: tuple[tuple[str, int], ...]

    @property
    def c_shifts(self) -> list[int]:
        return [s for k, s in self.entries if k == "C"]

    @property
    def r_shifts(self) -> list[int]:
        return [s for k, s in self.entries if k == "R"]

    def __len__(self):
        return len(self.entries)

    def log_abs(self, s):
        """log |L_inf(s)| via log-gamma; ``s`` may be a complex array."""
        s = np.asarray(s, dtype=np.complex128)
        total = np.zeros(s.shape)
        for kind, mu in self.entries:
            z = s + mu
            if kind == "C":
                total += math.log(2.0) - z.real * math.log(2 * math.pi) + loggamma(z).real
            else:
                total += -(z.real / 2) * math.log(math.pi) + loggamma(z / 2).real
        return total if total.ndim else float(total)


def gamma_factors(k1: int, k2: int) -> GammaFactorList:
    if not (k1 >= k2 >= 4):
        raise ValueError(f"need k1 >= k2 >= 4, got ({k1}, {k2})")
    if k1 > k2:
        cs = [k1 + k2 - 3, k1 - k2, k1 - 1, k1 - 2, k2 - 1, k2 - 2, 1]
        rs = [0, 1]
    else:
        cs = [2 * k1 - 3, k1 - 1, k1 - 1, k1 - 2, k1 - 2, 1]
        rs = [0, 0, 1, 1]
    return GammaFactorList(tuple([("C", c) for c in cs] + [("R", r) for r in rs]))


def archimedean_ratio(k1: int, k2: int, c: float, t):
    """|L_inf(c+it) / L_inf(1-c-it)| and the bound k1^{6(2c-1)} |1+it|^{8(2c-1)}.

    ``t`` may be an array; both outputs then have its shape.
    """
    if not (1.0 < c < 1.5):
        raise ValueError("c must lie in (1, 3/2)")
    g = gamma_factors(k1, k2)
    t_arr = np.asarray(t, dtype=np.float64)
    s = c + 1j * t_arr
    ratio = np.exp(g.log_abs(s) - g.log_abs(1 - s))
    e = 2 * c - 1
    bound = k1 ** (6 * e) * np.abs(1 + 1j * t_arr) ** (8 * e)
    if t_arr.ndim == 0:
        return float(ratio), float(bound)
    return ratio, bound


# -- convexity interpolation ------------------------------------------------


@dataclass(frozen=True)
class RademacherParams:
    a: float
    b: float
    E: float
    F: float
    P: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("need a < b")
        if not self.P + self.a > 0:
            raise ValueError("need P + a > 0")
        if not self.alpha >= self.beta:
            raise ValueError("need alpha >= beta")
        if self.E <= 0 or self.F <= 0:
            raise ValueError("edge constants must be positive")


def rademacher_bound(params: RademacherParams, s: complex) -> float:
    """(E|P+s|^alpha)^((b-sigma)/(b-a)) (F|P+s|^beta)^((sigma-a)/(b-a))."""
    pr = params
    sigma = complex(s).real
    if not pr.a <= sigma <= pr.b:
        raise ValueError(f"Re(s) = {sigma} outside [{pr.a}, {pr.b}]")
    mod = abs(pr.P + complex(s))
    w = (sigma - pr.a) / (pr.b - pr.a)
    log_left = math.log(pr.E) + pr.alpha * math.log(mod)
    log_right = math.log(pr.F) + pr.beta * math.log(mod)
    return math.exp((1 - w) * log_left + w * log_right)


# -- partial sums -------------------------------------------------------------


def partial_sum_experiment(tableF: EigenTable, tableG: EigenTable, checkpoints: Sequence[int], same: bool | None = None) -> ExperimentReport:
    """S(x) = sum_{n<=x} lambda_F(n) lambda_G(n) at the checkpoints.

    Reports the least-squares slope of log|S| against log x and, when F = G,
    the fitted constant c in S(x) ~ c x.
    """
    checkpoints = sorted(int(x) for x in checkpoints)
    if not checkpoints:
        return ExperimentReport("sums", {"checkpoints": []}, {"S": [], "slope": None})
    xmax = checkpoints[-1]
    if tableF.N < xmax or tableG.N < xmax:
        raise ValueError("tables do not reach the largest checkpoint")
    prod = tableF.as_float()[1 : xmax + 1] * tableG.as_float()[1 : xmax + 1]
    S = np.cumsum(prod)
    xs = np.array(checkpoints, dtype=np.float64)
    Sx = S[np.array(checkpoints) - 1]
    ok = Sx != 0
    slope = None
    if ok.sum() >= 2:
        slope = float(np.polyfit(np.log(xs[ok]), np.log(np.abs(Sx[ok])), 1)[0])
    if same is None:
        same = tableF is tableG
    results = {"x": checkpoints, "S": Sx.tolist(), "slope": slope}
    if same:
        results["c_hat"] = float(np.dot(Sx, xs) / np.dot(xs, xs))
    return ExperimentReport("sums", {"checkpoints": checkpoints, "same": bool(same)}, results)


def sums_to_csv(report: ExperimentReport) -> str:
    lines = ["x,S"]
    for x, s in zip(report.results["x"], report.results["S"]):
        lines.append(f"{x},{s!r}")
    return "\n".join(lines) + "\n"

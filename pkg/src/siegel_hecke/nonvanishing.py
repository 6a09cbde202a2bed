"""Joint non-vanishing of lambda_F(p^n) lambda_G(p^n) within n <= 14.

Holds the integer polynomial family f_n, the vanishing-pattern checks on a
single seed, the case classifier mirroring the branches of the argument,
and randomized sweeps that look for a pair needing n > 14.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import kernels
from .eigen_core import (
    ZERO_TOL,
    HeckeSeed,
    SatakePair,
    lambda_prime_powers,
    satake_to_seed,
)
from .graded import GradedRational, is_exact
from .report import ExperimentReport

MAX_INDEX = 14
# a float product this close to zero forces an exact recomputation
ESCALATE_TOL = 1e-6


# -- the f_n family -----------------------------------------------------------


@dataclass(frozen=True)
class FPoly:
    n: int
    coeffs: tuple[int, ...]  # constant first

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    @property
    def leading(self) -> int:
        return self.coeffs[-1]


@lru_cache(maxsize=None)
def f_family(n: int) -> FPoly:
    """f_0 = -1, f_1 = -x, f_{n+1} = x f_n - f_{n-1}."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    prev, cur = [-1], [0, -1]
    if n == 0:
        return FPoly(0, tuple(prev))
    for _ in range(1, n):
        nxt = [0] + cur
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return FPoly(n, tuple(cur))


def f_no_rational_root(n: int, x: Fraction) -> Fraction:
    """Exact f_n(x) for non-integral rational x; asserts it is nonzero."""
    x = Fraction(x)
    if x.denominator == 1:
        raise ValueError("integer argument lies outside the no-rational-root statement")
    val = f_family(n)(x)
    assert val != 0, f"f_{n}({x}) vanished"
    return val


# -- vanishing patterns on one seed -------------------------------------------


def _is_zero(x, tol: float) -> bool:
    if is_exact(x):
        return x == 0
    return abs(x) <= tol


@dataclass
class PatternReport:
    p: int
    window: int
    zeros: list[int]
    lam_p_zero: bool
    odd_all_zero: bool
    runs_of_four: list[int] = field(default_factory=list)
    odd_runs: list[int] = field(default_factory=list)
    even_runs: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """True when every structural claim holds on this window."""
        if self.odd_all_zero != self.lam_p_zero:
            return False
        if self.runs_of_four:
            return False
        if not self.lam_p_zero and (self.odd_runs or self.even_runs):
            return False
        return True


def vanishing_pattern_scan(seed: HeckeSeed, window: int = 64, tol: float = ZERO_TOL) -> PatternReport:
    """Zeros of lambda(p^m) for m <= window and the forbidden zero runs.

    runs_of_four lists t with lambda(p^m) = 0 for t+1 <= m <= t+4;
    odd_runs / even_runs list m >= 1 where the exponents 2(m+i)+1 resp.
    2(m+i), i = 0..3, all vanish.
    """
    if window > 200:
        raise ValueError("window is capped at 200")
    vals = lambda_prime_powers(seed, max(window, 2))[: window + 1]
    zero = [_is_zero(v, tol) for v in vals]
    zeros = [m for m in range(1, window + 1) if zero[m]]
    odd = [m for m in range(1, window + 1, 2)]
    report = PatternReport(
        p=seed.p,
        window=window,
        zeros=zeros,
        lam_p_zero=zero[1] if window >= 1 else False,
        odd_all_zero=all(zero[m] for m in odd),
    )
    for t in range(0, window - 3):
        if all(zero[t + 1 : t + 5]):
            report.runs_of_four.append(t)
    for m in range(1, window + 1):
        if 2 * (m + 3) + 1 <= window and all(zero[2 * (m + i) + 1] for i in range(4)):
            report.odd_runs.append(m)
        if 2 * (m + 3) <= window and all(zero[2 * (m + i)] for i in range(4)):
            report.even_runs.append(m)
    return report


# -- case classification -----------------------------------------------------


class CaseTag(enum.Enum):
    TRIVIAL = "TRIVIAL"
    ALL_ZERO = "ALL_ZERO"
    F_ZERO_G2_NONZERO = "F_ZERO_G2_NONZERO"
    F_ZERO_G1_NONZERO = "F_ZERO_G1_NONZERO"
    MIXED_F2_G1 = "MIXED_F2_G1"
    P2_BOUNDARY = "P2_BOUNDARY"


# first-nonvanishing index guaranteed by each branch of the argument
CASE_BOUND = {
    CaseTag.TRIVIAL: 2,
    CaseTag.ALL_ZERO: 4,
    CaseTag.F_ZERO_G2_NONZERO: 6,
    CaseTag.F_ZERO_G1_NONZERO: 10,
    CaseTag.MIXED_F2_G1: 14,
    CaseTag.P2_BOUNDARY: 10,
}


def _zero_flags(seed: HeckeSeed, tol: float) -> tuple[bool, bool]:
    return _is_zero(seed.lam_p, tol), _is_zero(seed.lam_p2, tol)


def _is_half(x, tol: float) -> bool:
    if is_exact(x):
        return GradedRational.coerce(x).square() == Fraction(1, 2)
    return abs(x * x - 0.5) <= tol


def classify_case(seedF: HeckeSeed, seedG: HeckeSeed, tol: float = ZERO_TOL) -> tuple[CaseTag, bool]:
    """Proof branch governing the pair, and whether F and G were swapped.

    Roles are normalised so that F is the side with lambda_F(p) = 0.
    """
    f1, f2 = _zero_flags(seedF, tol)
    g1, g2 = _zero_flags(seedG, tol)
    if not ((f1 or g1) and (f2 or g2)):
        return CaseTag.TRIVIAL, False
    swapped = False
    # put the side with more vanishing first
    if (g1 and g2 and not (f1 and f2)) or (not f1 and g1):
        seedF, seedG = seedG, seedF
        f1, f2, g1, g2 = g1, g2, f1, f2
        swapped = True
    if f1 and f2:
        if g1 and g2:
            return CaseTag.ALL_ZERO, swapped
        if g1:
            return CaseTag.F_ZERO_G2_NONZERO, swapped
        return CaseTag.F_ZERO_G1_NONZERO, swapped
    # remaining pattern: F = (0, b != 0), G = (a != 0, 0)
    assert f1 and not f2 and not g1 and g2, (f1, f2, g1, g2)
    if seedG.p == 2 and _is_half(seedG.lam_p, tol):
        return CaseTag.P2_BOUNDARY, swapped
    return CaseTag.MIXED_F2_G1, swapped


@dataclass
class NonvanishWitness:
    n: int | None
    value: object
    case: CaseTag
    exact: bool

    @property
    def anomaly(self) -> bool:
        return self.n is None

    @property
    def within_case_bound(self) -> bool:
        return self.n is not None and self.n <= CASE_BOUND[self.case]


def first_joint_nonvanishing(
    seedF: HeckeSeed, seedG: HeckeSeed, max_n: int = MAX_INDEX, tol: float = ZERO_TOL
) -> NonvanishWitness:
    """Smallest 1 <= n <= max_n with lambda_F(p^n) lambda_G(p^n) != 0.

    Float seeds whose products come within ESCALATE_TOL of zero are redone
    exactly (the float value converts losslessly).  A missing witness is
    reported with n=None rather than raised.
    """
    if seedF.p != seedG.p:
        raise ValueError("seeds must share the prime")
    exact = seedF.exact and seedG.exact
    if not exact:
        lf = lambda_prime_powers(seedF, max_n)
        lg = lambda_prime_powers(seedG, max_n)
        prods = [float(x) * float(y) for x, y in zip(lf, lg)]
        n = next((i for i in range(1, max_n + 1) if abs(prods[i]) > tol), None)
        upto = max_n if n is None else n
        if n is not None and min(abs(prods[i]) for i in range(1, upto + 1)) > ESCALATE_TOL:
            case, _ = classify_case(seedF, seedG, tol)
            return NonvanishWitness(n, prods[n], case, False)
        seedF, seedG = seedF.to_exact(), seedG.to_exact()
    case, _ = classify_case(seedF, seedG, 0.0)
    lf = lambda_prime_powers(seedF, max_n)
    lg = lambda_prime_powers(seedG, max_n)
    for i in range(1, max_n + 1):
        v = lf[i] * lg[i]
        if v != 0:
            return NonvanishWitness(i, v, case, True)
    return NonvanishWitness(None, None, case, True)


# -- sweeps -----------------------------------------------------------------

SPECIAL_ANGLES = (0.0, math.pi / 3, math.pi / 2, 2 * math.pi / 3, math.pi)
SHARD_SIZE = 10_000


@dataclass
class SweepConfig:
    """Sampler for seed pairs.

    satake mode draws angles uniformly on [0, pi]^2 and, with probability
    ``atom_prob`` per seed, one of the angles with integral 2cos (these give
    exact seeds).  free mode draws exact seeds from a rational grid inside
    |lambda(p)| <= 4, |lambda(p^2)| <= 14, with point masses at zero and
    optional half-integral grades lambda(p) = q p^(-1/2).
    """

    mode: str = "satake"
    primes: tuple[int, ...] = (2, 3, 5, 7, 97)
    atom_prob: float = 0.2
    zero_prob: float = 0.4
    odd_prob: float = 0.25
    max_den: int = 6
    inject_all_zero: float = 0.0
    tol: float = ZERO_TOL

    def __post_init__(self):
        if self.mode not in ("satake", "free"):
            raise ValueError(f"unknown sweep mode {self.mode!r}")
        self.primes = tuple(int(p) for p in self.primes)


def _rand_rational(rng: np.random.Generator, bound: float, max_den: int) -> Fraction:
    den = int(rng.integers(1, max_den + 1))
    lim = int(bound * den)
    return Fraction(int(rng.integers(-lim, lim + 1)), den)


def _free_seed(rng: np.random.Generator, p: int, cfg: SweepConfig) -> HeckeSeed:
    if rng.random() < cfg.zero_prob:
        lam_p = GradedRational(0)
    elif rng.random() < cfg.odd_prob:
        # q / sqrt(p) with |q| <= 4 sqrt(p); small q make lambda(p)^2 = 1/2 reachable at p = 2
        lam_p = GradedRational.odd(_rand_rational(rng, 4 * math.sqrt(p), 2), p)
    else:
        lam_p = GradedRational(_rand_rational(rng, 4.0, cfg.max_den))
    if rng.random() < cfg.zero_prob:
        lam_p2 = GradedRational(0)
    else:
        lam_p2 = GradedRational(_rand_rational(rng, 14.0, cfg.max_den))
    return HeckeSeed(p, lam_p, lam_p2)


@dataclass
class _ShardResult:
    histogram: dict[int, int]
    cases: dict[str, int]
    anomalies: list[dict]
    bound_violations: list[dict]
    escalations: int
    exact_pairs: int
    trials: int


def _record_pair(seedF, seedG, w, out: _ShardResult):
    from .serialize import seed_to_json

    if w.n is None:
        out.anomalies.append({"F": seed_to_json(seedF), "G": seed_to_json(seedG)})
        return
    out.histogram[w.n] = out.histogram.get(w.n, 0) + 1
    out.cases[w.case.value] = out.cases.get(w.case.value, 0) + 1
    if not w.within_case_bound:
        out.bound_violations.append(
            {"F": seed_to_json(seedF), "G": seed_to_json(seedG), "n": w.n, "case": w.case.value}
        )


def _run_shard(cfg: SweepConfig, trials: int, ss: np.random.SeedSequence) -> _ShardResult:
    rng = np.random.default_rng(ss)
    out = _ShardResult({}, {}, [], [], 0, 0, trials)
    primes = np.array(cfg.primes, dtype=np.int64)
    pidx = rng.integers(0, len(primes), size=trials)
    ps = primes[pidx]
    if cfg.mode == "free":
        for i in range(trials):
            p = int(ps[i])
            if rng.random() < cfg.inject_all_zero:
                sF = sG = HeckeSeed(p, 0, 0)
            else:
                sF, sG = _free_seed(rng, p, cfg), _free_seed(rng, p, cfg)
            w = first_joint_nonvanishing(sF, sG, MAX_INDEX, cfg.tol)
            out.exact_pairs += 1
            _record_pair(sF, sG, w, out)
        return out

    theta = rng.uniform(0.0, math.pi, size=(trials, 4))
    atoms = rng.random(size=(trials, 2)) < cfg.atom_prob
    special = rng.integers(0, len(SPECIAL_ANGLES), size=(trials, 4))
    sa = np.array(SPECIAL_ANGLES)
    theta[:, 0:2] = np.where(atoms[:, 0:1], sa[special[:, 0:2]], theta[:, 0:2])
    theta[:, 2:4] = np.where(atoms[:, 1:2], sa[special[:, 2:4]], theta[:, 2:4])
    u = 2 * np.cos(theta)
    aF = u[:, 0] + u[:, 1]
    aG = u[:, 2] + u[:, 3]
    bF = aF * aF - (2 + u[:, 0] * u[:, 1]) - 1.0 / ps
    bG = aG * aG - (2 + u[:, 2] * u[:, 3]) - 1.0 / ps
    tf = kernels.recurrence_table(aF, bF, 1.0 / ps, MAX_INDEX)
    tg = kernels.recurrence_table(aG, bG, 1.0 / ps, MAX_INDEX)
    first = kernels.first_joint_nonzero(tf, tg, cfg.tol)
    upto = np.where(first < 0, MAX_INDEX, first)
    closest = kernels.min_abs_prefix(tf, tg, upto)
    near_zero = (first < 0) | (closest <= ESCALATE_TOL)
    both_atoms = atoms[:, 0] & atoms[:, 1]
    # drawn only when requested so the default stream is unchanged
    inject = rng.random(trials) < cfg.inject_all_zero if cfg.inject_all_zero > 0 else np.zeros(trials, dtype=bool)
    redo = near_zero | both_atoms | inject
    for i in np.flatnonzero(~redo):
        n = int(first[i])
        out.histogram[n] = out.histogram.get(n, 0) + 1
        out.cases[CaseTag.TRIVIAL.value] = out.cases.get(CaseTag.TRIVIAL.value, 0) + 1
    for i in np.flatnonzero(redo):
        p = int(ps[i])
        if inject[i]:
            sF = sG = HeckeSeed(p, 0, 0)
            w = first_joint_nonvanishing(sF, sG, MAX_INDEX)
            out.exact_pairs += 1
            _record_pair(sF, sG, w, out)
            continue
        sides = ((aF[i], bF[i], 0, 1), (aG[i], bG[i], 2, 3))
        seeds = []
        for side, (a, b, j, k) in enumerate(sides):
            if atoms[i, side]:
                seeds.append(satake_to_seed(SatakePair(float(theta[i, j]), float(theta[i, k])), p))
            else:
                seeds.append(HeckeSeed(p, float(a), float(b)).to_exact())
        sF, sG = seeds
        out.escalations += int(near_zero[i])
        w = first_joint_nonvanishing(sF, sG, MAX_INDEX)
        out.exact_pairs += 1
        _record_pair(sF, sG, w, out)
    return out


def _merge(parts: Sequence[_ShardResult]) -> _ShardResult:
    total = _ShardResult({}, {}, [], [], 0, 0, 0)
    for part in parts:
        for k, v in part.histogram.items():
            total.histogram[k] = total.histogram.get(k, 0) + v
        for k, v in part.cases.items():
            total.cases[k] = total.cases.get(k, 0) + v
        total.anomalies += part.anomalies
        total.bound_violations += part.bound_violations
        total.escalations += part.escalations
        total.exact_pairs += part.exact_pairs
        total.trials += part.trials
    return total


def sweep_nonvanishing(
    cfg: SweepConfig | None = None, trials: int = 100_000, rng_seed: int = 0, workers: int = 1
) -> ExperimentReport:
    """Histogram of the first joint non-vanishing index over sampled pairs.

    Trials are split into fixed-size shards, each with its own child of the
    root seed sequence, so the result does not depend on ``workers``.
    """
    cfg = cfg or SweepConfig()
    root = np.random.SeedSequence(rng_seed)
    sizes = [SHARD_SIZE] * (trials // SHARD_SIZE)
    if trials % SHARD_SIZE:
        sizes.append(trials % SHARD_SIZE)
    children = root.spawn(len(sizes))
    if workers > 1 and len(sizes) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_run_shard, [cfg] * len(sizes), sizes, children))
    else:
        parts = [_run_shard(cfg, n, ss) for n, ss in zip(sizes, children)]
    total = _merge(parts)
    hist = dict(sorted(total.histogram.items()))
    return ExperimentReport(
        kind="nonvanish",
        config={"sweep": asdict(cfg), "trials": trials, "rng_seed": rng_seed},
        results={
            "histogram": {str(k): v for k, v in hist.items()},
            "max_index": max(hist) if hist else None,
            "cases": dict(sorted(total.cases.items())),
            "anomaly_count": len(total.anomalies),
            "bound_violations": total.bound_violations,
            "escalations": total.escalations,
            "exact_pairs": total.exact_pairs,
            "trials": total.trials,
        },
        anomalies=total.anomalies,
    )


def replay_pairs(pairs: Sequence[tuple[HeckeSeed, HeckeSeed]], tol: float = ZERO_TOL) -> ExperimentReport:
    """Re-run stored pairs (e.g. a sweep's anomaly file) one by one."""
    out = _ShardResult({}, {}, [], [], 0, 0, 0)
    rows = []
    for seedF, seedG in pairs:
        w = first_joint_nonvanishing(seedF, seedG, tol=tol)
        _record_pair(seedF, seedG, w, out)
        out.trials += 1
        rows.append({"n": w.n, "case": w.case.value, "exact": w.exact})
    return ExperimentReport(
        kind="nonvanish",
        config={"replay": len(pairs), "tol": tol},
        results={
            "pairs": rows,
            "histogram": {str(k): v for k, v in sorted(out.histogram.items())},
            "max_index": max(out.histogram) if out.histogram else None,
            "anomaly_count": len(out.anomalies),
            "bound_violations": out.bound_violations,
            "trials": out.trials,
        },
        anomalies=out.anomalies,
    )

"""Monte Carlo for sign statistics of lambda_F(n) lambda_G(n).

Systems are drawn prime by prime from a measure on Satake angles
(theta1, theta2) in [0, pi]^2, then extended multiplicatively.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from . import kernels
from .eigen_core import (
    ZERO_TOL,
    EigenSystem,
    EigenTable,
    SatakePair,
    lambda_prime_powers,
    satake_to_seed,
    table_from_arrays,
)
from .graded import is_exact
from .primes import prime_array, prime_pi, primes_upto
from .report import ExperimentReport

# max of (x - y)^2 (1 - x^2)(1 - y^2) on [-1, 1]^2, attained at x = -y = 1/sqrt(3)
SATO_TATE_ENVELOPE = 16.0 / 27.0
HYPOTHESIS_FRACTION = Fraction(16, 17)


def sato_tate_weight(t1, t2):
    """Unnormalised USp(4) Haar density in the Satake angles."""
    c1, c2 = np.cos(t1), np.cos(t2)
    return (c1 - c2) ** 2 * np.sin(t1) ** 2 * np.sin(t2) ** 2


DENSITIES: dict[str, tuple[Callable, float]] = {
    "sato-tate": (sato_tate_weight, SATO_TATE_ENVELOPE),
}


@dataclass(frozen=True)
class SamplingMeasure:
    """Measure on (theta1, theta2).

    kind is "uniform", "weighted" (density named in ``density``) or
    "pinned" (a point mass at ``point``). An optional atom at
    ``atom`` carries mass ``atom_mass`` on top of any kind.
    """

    kind: str = "uniform"
    density: str | None = None
    point: tuple[float, float] | None = None
    atom: tuple[float, float] | None = None
    atom_mass: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform", "weighted", "pinned"):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.kind == "weighted" and self.density not in DENSITIES:
            raise ValueError(f"unknown density {self.density!r}; known: {sorted(DENSITIES)}")
        if self.kind == "pinned" and self.point is None:
            raise ValueError("pinned measure needs a point")
        if not 0.0 <= self.atom_mass <= 1.0:
            raise ValueError("atom mass must lie in [0, 1]")
        if self.atom_mass > 0 and self.atom is None:
            raise ValueError("atom mass given without an atom")

    @classmethod
    def parse(cls, spec: str) -> "SamplingMeasure":
        """'uniform', 'weighted:sato-tate', 'pinned:pi,0', with an optional
        ';atom=pi,0@0.1' suffix.
        """
        head, _, rest = spec.partition(";")
        atom, mass = None, 0.0
        if rest:
            key, _, val = rest.partition("=")
            if key.strip() != "atom" or "@" not in val:
                raise ValueError(f"bad atom spec {rest!r}")
            pt, _, m = val.partition("@")
            atom, mass = _parse_point(pt), float(m)
        kind, _, arg = head.strip().partition(":")
        if kind == "uniform":
            return cls("uniform", atom=atom, atom_mass=mass)
        if kind == "weighted":
            return cls("weighted", density=arg or "sato-tate", atom=atom, atom_mass=mass)
        if kind == "pinned":
            return cls("pinned", point=_parse_point(arg), atom=atom, atom_mass=mass)
        raise ValueError(f"unknown measure {spec!r}")

    def spec(self) -> str:
        s = {"uniform": "uniform", "weighted": f"weighted:{self.density}"}.get(self.kind)
        if s is None:
            s = f"pinned:{self.point[0]!r},{self.point[1]!r}"
        if self.atom_mass > 0:
            s += f";atom={self.atom[0]!r},{self.atom[1]!r}@{self.atom_mass!r}"
        return s

    def sample_angles(self, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "pinned":
            t1 = np.full(n, float(self.point[0]))
            t2 = np.full(n, float(self.point[1]))
        elif self.kind == "uniform":
            t1 = rng.uniform(0.0, math.pi, n)
            t2 = rng.uniform(0.0, math.pi, n)
        else:
            t1, t2 = _rejection(self.density, n, rng)
        if self.atom_mass > 0:
            hit = rng.random(n) < self.atom_mass
            t1 = np.where(hit, self.atom[0], t1)
            t2 = np.where(hit, self.atom[1], t2)
        return t1, t2


def _parse_point(s: str) -> tuple[float, float]:
    parts = [x.strip() for x in s.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two angles, got {s!r}")

    def one(x):
        x = x.lower()
        if x in ("pi", "π"):
            return math.pi
        if x.endswith("pi"):
            return float(x[:-2].rstrip("*")) * math.pi
        if "pi/" in x:
            num, den = x.split("pi/")
            return (float(num.rstrip("*")) if num else 1.0) * math.pi / float(den)
        return float(x)

    return one(parts[0]), one(parts[1])


def _rejection(name: str, n: int, rng: np.random.Generator):
    weight, envelope = DENSITIES[name]
    t1 = np.empty(n)
    t2 = np.empty(n)
    filled = 0
    while filled < n:
        m = max(2 * (n - filled), 64)
        a = rng.uniform(0.0, math.pi, m)
        b = rng.uniform(0.0, math.pi, m)
        keep = rng.random(m) * envelope < weight(a, b)
        a, b = a[keep], b[keep]
        take = min(len(a), n - filled)
        t1[filled : filled + take] = a[:take]
        t2[filled : filled + take] = b[:take]
        filled += take
    return t1, t2


def seed_arrays(t1: np.ndarray, t2: np.ndarray, primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(lambda(p), lambda(p^2)) from angles, vectorised."""
    u, v = 2 * np.cos(t1), 2 * np.cos(t2)
    a = u + v
    return a, a * a - (2.0 + u * v) - 1.0 / np.asarray(primes, dtype=np.float64)


def sample_system(measure: SamplingMeasure, primes: Sequence[int], rng_seed) -> EigenSystem:
    """Independent Satake seeds per prime; deterministic in ``rng_seed``.

    Angles whose 2cos values are integers (0, pi/3, pi/2, 2pi/3, pi) give
    exact seeds.
    """
    primes = list(primes)
    if not primes:
        raise ValueError("need at least one prime")
    rng = np.random.default_rng(rng_seed)
    t1, t2 = measure.sample_angles(len(primes), rng)
    seeds = [satake_to_seed(SatakePair(float(a), float(b)), p) for p, a, b in zip(primes, t1, t2)]
    return EigenSystem.from_seeds(seeds, provenance="satake-sampled")


def sample_table(measure: SamplingMeasure, N: int, rng_seed) -> EigenTable:
    """Float table to N from one draw per prime (bulk path)."""
    primes = prime_array(N)
    rng = np.random.default_rng(rng_seed)
    t1, t2 = measure.sample_angles(len(primes), rng)
    lam_p, lam_p2 = seed_arrays(t1, t2, primes)
    return table_from_arrays(N, primes, lam_p, lam_p2)


# -- censuses -------------------------------------------------------------


@dataclass(frozen=True)
class SignCensus:
    x: int
    pos: int
    neg: int
    zero: int

    def __post_init__(self):
        if self.pos + self.neg + self.zero != self.x:
            raise ValueError("census counts do not sum to x")

    @property
    def pos_fraction(self) -> float:
        nz = self.pos + self.neg
        return self.pos / nz if nz else float("nan")


def _check_reach(table: EigenTable, x: int):
    if table.N < x:
        raise ValueError(f"table cutoff {table.N} below x={x}")


def sign_census(tableF: EigenTable, tableG: EigenTable, x: int, tol: float = ZERO_TOL) -> SignCensus:
    """Signs of lambda_F(n) lambda_G(n) over n <= x; tol only applies to floats."""
    _check_reach(tableF, x)
    _check_reach(tableG, x)
    if tableF.exact and tableG.exact:
        pos = neg = 0
        for n in range(1, x + 1):
            s = tableF.values[n].sign() * tableG.values[n].sign()
            pos += s > 0
            neg += s < 0
        return SignCensus(x, pos, neg, x - pos - neg)
    prod = tableF.as_float()[: x + 1] * tableG.as_float()[: x + 1]
    # tolerance applies to each factor, not the product
    small = (np.abs(tableF.as_float()[: x + 1]) <= tol) | (np.abs(tableG.as_float()[: x + 1]) <= tol)
    prod = np.where(small, 0.0, prod)
    pos, neg, zero = kernels.sign_counts(prod, 0.0)
    return SignCensus(x, int(pos), int(neg), int(zero))


# -- Matomaki-Radziwill density --------------------------------------------


@dataclass(frozen=True)
class HFunction:
    """0/1 values on prime powers.

    ``pattern[p]`` lists h(p), h(p^2), ..., h(p^m); exponents past m take
    ``tail[p]``. Primes not listed use ``default_pattern`` and
    ``default_tail``.
    """

    pattern: Mapping[int, tuple[int, ...]] = field(default_factory=dict)
    tail: Mapping[int, int] = field(default_factory=dict)
    default_pattern: tuple[int, ...] = ()
    default_tail: int = 1

    def __post_init__(self):
        vals = [self.default_tail, *self.default_pattern, *self.tail.values()]
        for pat in self.pattern.values():
            vals.extend(pat)
        if any(v not in (0, 1) for v in vals):
            raise ValueError("h takes values in {0, 1}")

    def __call__(self, p: int, j: int) -> int:
        pat = self.pattern.get(p, self.default_pattern)
        if 1 <= j <= len(pat):
            return pat[j - 1]
        return self.tail.get(p, self.default_tail) if p in self.pattern else self.default_tail

    @classmethod
    def ones(cls) -> "HFunction":
        return cls()

    @classmethod
    def from_systems(cls, sysF: EigenSystem, sysG: EigenSystem, depth: int = 14) -> "HFunction":
        """h(p^j) = [lambda_F(p^j) lambda_G(p^j) != 0] for j <= depth, 1 beyond."""
        pattern = {}
        for p in sysF.primes():
            lf = lambda_prime_powers(sysF[p], depth)
            lg = lambda_prime_powers(sysG[p], depth)
            pattern[p] = tuple(int(_nonzero(x) and _nonzero(y)) for x, y in zip(lf[1:], lg[1:]))
        return cls(pattern)

    def local_factor(self, p: int) -> Fraction:
        """(1 - 1/p)(1 + sum_j h(p^j)/p^j), summing the constant tail exactly."""
        pat = self.pattern.get(p, self.default_pattern)
        t = self.tail.get(p, self.default_tail) if p in self.pattern else self.default_tail
        inv = Fraction(1, p)
        s = Fraction(1)
        for j, h in enumerate(pat, 1):
            s += h * inv**j
        m = len(pat)
        s += t * inv ** (m + 1) / (1 - inv)
        return (1 - inv) * s


def _nonzero(x) -> bool:
    return x != 0 if is_exact(x) else abs(float(x)) > ZERO_TOL


def mr_density(h: HFunction, P: int) -> tuple[Fraction, float]:
    """Euler product over p <= P and a bound on |log| of the omitted p > P.

    Geometric tails in j are summed exactly. For the omitted primes each
    factor is 1 when the default values are all 1, lies in [1 - 1/p^2, 1]
    when only h(p) = 1 is guaranteed (bound 2/P), and is unbounded
    otherwise (bound inf).
    """
    val = Fraction(1)
    for p in primes_upto(P):
        val *= h.local_factor(p)
    dp, dt = h.default_pattern, h.default_tail
    if dt == 1 and all(v == 1 for v in dp):
        tail = 0.0
    elif (dp[:1] or (dt,))[0] == 1:
        # sum_{p > P} 1/p^2 with log(1 - y) >= -2y for y <= 1/4
        tail = 2.0 / P if P >= 2 else math.inf
    else:
        tail = math.inf
    return val, tail


# -- prime-sign estimators ----------------------------------------------------


@dataclass(frozen=True)
class PrimeSignEstimate:
    x: int
    S_plus: float
    S_minus: float
    pos_primes: int
    neg_primes: int

    @property
    def pos_lower(self) -> float:
        return self.S_plus / 512

    @property
    def neg_lower(self) -> float:
        return self.S_minus / 512

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "S_plus": self.S_plus,
            "S_minus": self.S_minus,
            "pos_lower": self.pos_lower,
            "neg_lower": self.neg_lower,
            "pos_primes": self.pos_primes,
            "neg_primes": self.neg_primes,
        }


def _prime_values(table: EigenTable, x: int) -> tuple[np.ndarray, np.ndarray]:
    _check_reach(table, x)
    ps = prime_array(x)
    return ps, table.as_float()[ps]


def prime_sign_estimator(tableF: EigenTable, tableG: EigenTable, x: int, tol: float = ZERO_TOL) -> PrimeSignEstimate:
    """S(+-)(x) = sum_{p <= x} (l(p) +- 16) l(p) with l = lambda_F lambda_G.

    When |l(p)| <= 16 each S+ term lies in [0, 512] exactly when l(p) >= 0,
    so #{p : l(p) > 0} >= S+/512; symmetrically for S-.
    """
    _, f = _prime_values(tableF, x)
    _, g = _prime_values(tableG, x)
    l = f * g
    sp = float(np.sum((l + 16.0) * l))
    sm = float(np.sum((l - 16.0) * l))
    pos = int(np.count_nonzero(l > tol))
    neg = int(np.count_nonzero(l < -tol))
    return PrimeSignEstimate(x, sp, sm, pos, neg)


@dataclass(frozen=True)
class HypothesisResult:
    x: int
    c: float
    count: int
    threshold: float

    @property
    def fraction(self) -> float:
        """count / (x / log x)."""
        return self.count / (self.x / math.log(self.x))

    @property
    def passed(self) -> bool:
        return self.count >= self.threshold


def hypothesis_check(tableG: EigenTable, c: float, x: int, fraction: Fraction = HYPOTHESIS_FRACTION) -> HypothesisResult:
    """#{p <= x : |lambda_G(p)| > c} against fraction * x / log x."""
    if not 0 < c < 4:
        raise ValueError("c must lie in (0, 4)")
    if x < 2:
        raise ValueError("x must be at least 2")
    _, vals = _prime_values(tableG, x)
    count = int(np.count_nonzero(np.abs(vals) > c))
    return HypothesisResult(x, c, count, float(fraction) * x / math.log(x))


def zero_density_report(table: EigenTable, x: int, delta: float = 0.5, tol: float = ZERO_TOL) -> dict:
    """Zeros of lambda at primes p <= x against x / (log x)^(1 + delta)."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    ps, vals = _prime_values(table, x)
    count = int(np.count_nonzero(np.abs(vals) <= tol))
    ref = x / math.log(x) ** (1 + delta) if x >= 2 else 0.0
    return {"x": x, "delta": delta, "count": count, "primes": len(ps), "reference": ref}


# -- batched experiment ----------------------------------------------------------


def _pair_job(args):
    measure_spec, x, census_x, prime_x, c, child = args
    measure = SamplingMeasure.parse(measure_spec)
    sF, sG = child.spawn(2)
    N = max(x, census_x, prime_x)
    tF = sample_table(measure, N, sF)
    tG = sample_table(measure, N, sG)
    census = sign_census(tF, tG, census_x)
    est = prime_sign_estimator(tF, tG, prime_x)
    hyp_F = hypothesis_check(tF, c, x)
    hyp_G = hypothesis_check(tG, c, x)
    return {
        "census": {"x": census.x, "pos": census.pos, "neg": census.neg, "zero": census.zero, "pos_fraction": census.pos_fraction},
        "primes": est.to_dict(),
        "hypothesis": {"F": hyp_F.count, "G": hyp_G.count, "threshold": hyp_G.threshold, "passed": hyp_F.passed and hyp_G.passed},
        "zeros": {"F": zero_density_report(tF, x)["count"], "G": zero_density_report(tG, x)["count"]},
    }


def signs_experiment(
    measure: SamplingMeasure,
    pairs: int,
    x: int,
    rng_seed: int,
    c: float = 0.1,
    prime_x: int | None = None,
    workers: int = 1,
    tol_band: float = 0.03,
) -> ExperimentReport:
    """Sample independent (F, G) pairs and run census, estimators and hypothesis."""
    prime_x = prime_x or x
    children = np.random.SeedSequence(rng_seed).spawn(pairs)
    jobs = [(measure.spec(), x, x, prime_x, c, ch) for ch in children]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            rows = list(ex.map(_pair_job, jobs))
    else:
        rows = [_pair_job(j) for j in jobs]
    anomalies = []
    for i, r in enumerate(rows):
        if not r["hypothesis"]["passed"]:
            continue
        if abs(r["census"]["pos_fraction"] - 0.5) > tol_band:
            anomalies.append({"pair": i, "reason": "sign fraction outside band", "pos_fraction": r["census"]["pos_fraction"]})
        if r["primes"]["pos_lower"] <= 0:
            anomalies.append({"pair": i, "reason": "no positive-density detection"})
    config = {"measure": measure.spec(), "pairs": pairs, "x": x, "prime_x": prime_x, "rng_seed": rng_seed, "c": c, "tol_band": tol_band}
    return ExperimentReport("signs", config, {"pairs": rows, "pi_x": prime_pi(x)}, anomalies)

"""Eigenvalue seeds, the four-term Hecke recurrence and multiplicative tables.

Two arithmetic modes coexist.  Exact seeds hold ``GradedRational`` values
and every derived quantity stays exact; float seeds hold binary64 values
and bulk work goes through the kernels in ``siegel_hecke.kernels``.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import kernels
from .graded import ONE, ZERO, GradedRational
from .primes import is_prime, primes_upto

Value = Union[GradedRational, float]

# float zero test; exact mode never uses a tolerance
ZERO_TOL = 1e-9
SATAKE_TOL = 1e-9


class SeedError(ValueError):
    pass


class MissingPrimeError(KeyError):
    def __init__(self, p: int):
        super().__init__(p)
        self.p = p

    def __str__(self):
        return f"no seed for prime {self.p}"


class IngestError(ValueError):
    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


def _coerce_value(x) -> Value:
    if isinstance(x, GradedRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GradedRational(x)
    if isinstance(x, str):
        from .graded import parse

        return parse(x)
    return float(x)


@dataclass(frozen=True)
class HeckeSeed:
    """(lambda(p), lambda(p^2), p): everything the recurrence needs at p."""

    p: int
    lam_p: Value
    lam_p2: Value

    def __post_init__(self):
        if not is_prime(self.p):
            raise SeedError(f"{self.p} is not prime")
        lp, lp2 = _coerce_value(self.lam_p), _coerce_value(self.lam_p2)
        if isinstance(lp, GradedRational) != isinstance(lp2, GradedRational):
            # mixed input degrades to float
            lp, lp2 = float(lp), float(lp2)
        if isinstance(lp, GradedRational):
            if lp.rad not in (1, self.p):
                raise SeedError(f"lambda(p) grade rad={lp.rad} incompatible with p={self.p}")
            if lp2.rad != 1:
                raise SeedError("lambda(p^2) must be rational (even grade)")
        object.__setattr__(self, "lam_p", lp)
        object.__setattr__(self, "lam_p2", lp2)

    @property
    def exact(self) -> bool:
        return isinstance(self.lam_p, GradedRational)

    @property
    def inv_p(self):
        return GradedRational(Fraction(1, self.p)) if self.exact else 1.0 / self.p

    @property
    def c(self) -> Value:
        """lambda(p)^2 - lambda(p^2) - 1/p, the middle spin coefficient."""
        return self.lam_p * self.lam_p - self.lam_p2 - self.inv_p

    def to_float(self) -> "HeckeSeed":
        return HeckeSeed(self.p, float(self.lam_p), float(self.lam_p2))

    def to_exact(self) -> "HeckeSeed":
        """Exact seed with the same value; floats convert losslessly."""
        if self.exact:
            return self
        return HeckeSeed(self.p, Fraction(self.lam_p), Fraction(self.lam_p2))

    def satake_uv(self):
        """Recover (u, v) = (2cos t1, 2cos t2) as roots of z^2 - a z + (c - 2).

        Returned as complex numbers; the seed is Satake-realizable exactly
        when both are real and lie in [-2, 2].
        """
        a = float(self.lam_p)
        c = float(self.c)
        disc = cmath.sqrt(a * a - 4.0 * (c - 2.0))
        return (a + disc) / 2.0, (a - disc) / 2.0

    def is_satake(self, tol: float = SATAKE_TOL) -> bool:
        u, v = self.satake_uv()
        for z in (u, v):
            if abs(z.imag) > math.sqrt(tol) or abs(z.real) > 2.0 + tol:
                return False
        return True


def validate_seed(seed: HeckeSeed, regime: str = "free", tol: float = SATAKE_TOL) -> HeckeSeed:
    """Check a seed against ``free`` (anything) or ``satake`` constraints."""
    if regime == "free":
        return seed
    if regime != "satake":
        raise ValueError(f"unknown seed regime {regime!r}")
    a = float(seed.lam_p)
    c = float(seed.c)
    if abs(a) > 4.0 + tol:
        raise SeedError(f"|lambda(p)| = {abs(a)} exceeds 4")
    if not (-2.0 - tol <= c <= 6.0 + tol):
        raise SeedError(f"spin coefficient {c} outside [-2, 6]")
    if not seed.is_satake(tol):
        raise SeedError("Satake parameters are not on the unit circle")
    return seed


@dataclass(frozen=True)
class SatakePair:
    theta1: float
    theta2: float

    def __post_init__(self):
        for t in (self.theta1, self.theta2):
            if not (0.0 <= t <= math.pi + 1e-12):
                raise SeedError(f"angle {t} outside [0, pi]")

    @property
    def u(self) -> float:
        return 2.0 * math.cos(self.theta1)

    @property
    def v(self) -> float:
        return 2.0 * math.cos(self.theta2)

    def roots(self) -> list[complex]:
        """The unitary Satake parameters e^{+-i t1}, e^{+-i t2}."""
        out = []
        for t in (self.theta1, self.theta2):
            z = cmath.exp(1j * t)
            out += [z, z.conjugate()]
        return out


def _snap_int(x: float, tol: float = 1e-12):
    r = round(x)
    return int(r) if abs(x - r) <= tol else None


def satake_to_seed(sp: SatakePair, p: int, exact: bool | None = None) -> HeckeSeed:
    """Seed with lambda(p) = u + v and lambda(p^2) = (u+v)^2 - (2+uv) - 1/p.

    When both u and v are integers (angles 0, pi/3, pi/2, 2pi/3, pi) the
    seed is built exactly unless ``exact=False``.
    """
    u, v = sp.u, sp.v
    ui, vi = _snap_int(u), _snap_int(v)
    if exact is None:
        exact = ui is not None and vi is not None
    if exact:
        if ui is None or vi is None:
            raise SeedError("angles do not give integer 2cos values; exact seed impossible")
        a = ui + vi
        lam_p2 = Fraction(a * a - (2 + ui * vi)) - Fraction(1, p)
        return HeckeSeed(p, GradedRational(a), GradedRational(lam_p2))
    a = u + v
    return HeckeSeed(p, a, a * a - (2.0 + u * v) - 1.0 / p)


def spin_poly(seed: HeckeSeed) -> list:
    """Coefficients [1, -a, c, -a, 1] of the local spin denominator."""
    a = seed.lam_p
    c = seed.c
    one = ONE if seed.exact else 1.0
    return [one, -a, c, -a, one]


@lru_cache(maxsize=65536)
def _exact_powers(seed: HeckeSeed, nmax: int) -> tuple:
    out = [ONE, seed.lam_p, seed.lam_p2]
    a, c = seed.lam_p, seed.c
    for n in range(3, nmax + 1):
        v = a * out[n - 1] - c * out[n - 2] + a * out[n - 3]
        if n >= 4:
            v = v - out[n - 4]
        out.append(v)
    return tuple(out[: nmax + 1])


def lambda_prime_powers(seed: HeckeSeed, nmax: int) -> list:
    """[lambda(p^0), ..., lambda(p^nmax)]."""
    if nmax < 0:
        raise ValueError("exponent must be nonnegative")
    if seed.exact:
        return list(_exact_powers(seed, max(nmax, 2)))[: nmax + 1]
    row = kernels.recurrence_table(
        np.array([seed.lam_p]), np.array([seed.lam_p2]), np.array([1.0 / seed.p]), max(nmax, 2)
    )[0]
    return [float(x) for x in row[: nmax + 1]]


def lambda_prime_power(seed: HeckeSeed, n: int) -> Value:
    return lambda_prime_powers(seed, n)[n]


def lambda_prime_power_array(lam_p, lam_p2, p, nmax: int) -> np.ndarray:
    """Vectorized float recurrence over many seeds at once."""
    p = np.broadcast_to(np.asarray(p, dtype=np.float64), np.shape(lam_p))
    return kernels.recurrence_table(lam_p, lam_p2, 1.0 / p, nmax)


# -- raw eigenvalue records -------------------------------------------------


@dataclass(frozen=True)
class RawEigenRecord:
    p: int
    n: int
    mu: int
    k: int

    def __post_init__(self):
        if self.k < 4:
            raise IngestError(f"weight k={self.k} < 4")
        if self.n < 1:
            raise IngestError(f"exponent n={self.n} < 1")
        if not is_prime(self.p):
            raise IngestError(f"{self.p} is not prime")


def normalize(rec: RawEigenRecord) -> GradedRational:
    """lambda(p^n) = mu(p^n) p^(-n(2k-3)/2) as an exact graded value."""
    e = rec.n * (2 * rec.k - 3)
    q = Fraction(rec.mu, rec.p ** (e // 2))
    return GradedRational(q, rec.p if e % 2 else 1)


def denormalize(value: GradedRational, p: int, n: int, k: int) -> RawEigenRecord:
    e = n * (2 * k - 3)
    expected_rad = p if e % 2 else 1
    if value.q != 0 and value.rad != expected_rad:
        raise ValueError("grade does not match exponent parity")
    mu = value.q * p ** (e // 2)
    if mu.denominator != 1:
        raise ValueError("value does not come from an integral eigenvalue")
    return RawEigenRecord(p, n, int(mu), k)


# -- systems and tables -----------------------------------------------------


@dataclass
class EigenSystem:
    seeds: dict[int, HeckeSeed]
    provenance: str = "manual"
    records: list[RawEigenRecord] = field(default_factory=list)
    weight: int | None = None

    def __post_init__(self):
        if self.provenance not in ("ingested", "satake-sampled", "manual"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        for key, seed in self.seeds.items():
            if seed.p != key:
                raise SeedError(f"seed for {seed.p} stored under key {key}")

    @classmethod
    def from_seeds(cls, seeds: Iterable[HeckeSeed], provenance: str = "manual") -> "EigenSystem":
        out: dict[int, HeckeSeed] = {}
        for s in seeds:
            if s.p in out:
                raise SeedError(f"duplicate prime {s.p}")
            out[s.p] = s
        return cls(out, provenance)

    @classmethod
    def constant(cls, lam_p, lam_p2, primes: Sequence[int]) -> "EigenSystem":
        """Same (lambda(p), lambda(p^2)) at every prime, e.g. the zero seed."""
        return cls({p: HeckeSeed(p, lam_p, lam_p2) for p in primes})

    @property
    def exact(self) -> bool:
        return all(s.exact for s in self.seeds.values())

    def __getitem__(self, p: int) -> HeckeSeed:
        try:
            return self.seeds[p]
        except KeyError:
            raise MissingPrimeError(p) from None

    def primes(self) -> list[int]:
        return sorted(self.seeds)


@dataclass
class EigenTable:
    """lambda(n) for 1 <= n <= N; index 0 is unused."""

    N: int
    values: list | np.ndarray
    exact: bool

    def __getitem__(self, n: int):
        if not 1 <= n <= self.N:
            raise IndexError(f"n={n} outside 1..{self.N}")
        return self.values[n]

    def as_float(self) -> np.ndarray:
        if isinstance(self.values, np.ndarray):
            return self.values
        return np.array([0.0] + [float(v) for v in self.values[1:]])


def _max_exponent(p: int, N: int) -> int:
    k = 0
    q = p
    while q <= N:
        k += 1
        q *= p
    return k


def extend_multiplicative(sys: EigenSystem, N: int, mode: str | None = None) -> EigenTable:
    """lambda(n) = prod lambda(p^v_p(n)) for n <= N.

    ``mode`` is ``exact``, ``float`` or None (exact iff every seed is).
    """
    primes = primes_upto(N)
    for p in primes:
        if p not in sys.seeds:
            raise MissingPrimeError(p)
    if mode is None:
        mode = "exact" if sys.exact else "float"
    if mode == "exact":
        if not sys.exact:
            seeds = {p: sys.seeds[p].to_exact() for p in primes}
        else:
            seeds = sys.seeds
        return EigenTable(N, _exact_table(seeds, primes, N), True)
    if mode != "float":
        raise ValueError(f"unknown mode {mode!r}")
    if not primes:
        vals = np.zeros(N + 1)
        if N >= 1:
            vals[1] = 1.0
        return EigenTable(N, vals, False)
    kmax = max(_max_exponent(2, N), 2)
    pa = np.array(primes, dtype=np.int64)
    lam_p = np.array([float(sys.seeds[p].lam_p) for p in primes])
    lam_p2 = np.array([float(sys.seeds[p].lam_p2) for p in primes])
    pp = kernels.recurrence_table(lam_p, lam_p2, 1.0 / pa, kmax)
    return EigenTable(N, kernels.multiplicative_table(N, pa, pp), False)


def table_from_arrays(N: int, primes: np.ndarray, lam_p: np.ndarray, lam_p2: np.ndarray) -> EigenTable:
    """Float table straight from per-prime arrays (bulk simulation path)."""
    kmax = max(_max_exponent(2, N), 2)
    pa = np.asarray(primes, dtype=np.int64)
    pp = kernels.recurrence_table(lam_p, lam_p2, 1.0 / pa, kmax)
    return EigenTable(N, kernels.multiplicative_table(N, pa, pp), False)


def _exact_table(seeds: Mapping[int, HeckeSeed], primes: list[int], N: int) -> list:
    powers = {p: lambda_prime_powers(seeds[p], _max_exponent(p, N)) for p in primes}
    return multiplicative_from_powers(powers, N)


def multiplicative_from_powers(powers: Mapping[int, Sequence], N: int, one=ONE, zero=ZERO) -> list:
    """Exact multiplicative extension: powers[p][k] is the value at p^k.

    Exponents beyond the supplied list count as zero.
    """
    spf = list(range(N + 1))
    for p in primes_upto(math.isqrt(N)):
        for m in range(p * p, N + 1, p):
            if spf[m] == m:
                spf[m] = p
    vals: list = [zero] * (N + 1)
    if N >= 1:
        vals[1] = one
    for n in range(2, N + 1):
        p = spf[n]
        if p not in powers:
            raise MissingPrimeError(p)
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        pk = powers[p]
        vals[n] = (pk[k] * vals[m]) if k < len(pk) else zero
    return vals


# -- ingestion ---------------------------------------------------------------


def read_records(path) -> list[RawEigenRecord]:
    """Parse a ``p,n,mu,k`` CSV.  Duplicate (p, n) pairs are rejected."""
    records: list[RawEigenRecord] = []
    seen: dict[tuple[int, int], int] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError("empty file", 1) from None
        if [h.strip() for h in header] != ["p", "n", "mu", "k"]:
            raise IngestError(f"expected header p,n,mu,k, got {','.join(header)}", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise IngestError(f"expected 4 fields, got {len(row)}", lineno)
            try:
                p, n, mu, k = (int(c.strip()) for c in row)
            except ValueError:
                raise IngestError(f"non-integer field in {row}", lineno) from None
            if (p, n) in seen:
                raise IngestError(f"duplicate (p={p}, n={n}), first seen on row {seen[p, n]}", lineno)
            seen[p, n] = lineno
            try:
                records.append(RawEigenRecord(p, n, mu, k))
            except IngestError as exc:
                raise IngestError(str(exc), lineno) from None
    return records


def system_from_records(records: Sequence[RawEigenRecord]) -> EigenSystem:
    """Seeds from the n=1 and n=2 records; higher exponents are kept as-is."""
    weights = {r.k for r in records}
    if len(weights) > 1:
        raise IngestError(f"mixed weights {sorted(weights)} in one system")
    by_p: dict[int, dict[int, GradedRational]] = {}
    for r in records:
        by_p.setdefault(r.p, {})[r.n] = normalize(r)
    seeds = {}
    for p, vals in by_p.items():
        if 1 in vals and 2 in vals:
            seeds[p] = HeckeSeed(p, vals[1], vals[2])
    return EigenSystem(seeds, "ingested", list(records), weights.pop() if weights else None)


def record_consistency(sys: EigenSystem) -> list[tuple[int, int]]:
    """(p, n) records with n >= 3 that disagree with the recurrence."""
    bad = []
    for r in sys.records:
        if r.n >= 3 and r.p in sys.seeds:
            if lambda_prime_power(sys.seeds[r.p], r.n) != normalize(r):
                bad.append((r.p, r.n))
    return bad

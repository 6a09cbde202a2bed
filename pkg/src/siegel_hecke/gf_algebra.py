"""Rational generating functions: series extraction and Hadamard products.

Polynomials are dense coefficient lists, constant term first.  Coefficients
may be ``GradedRational`` (exact), float or complex; the helpers only use
ring operations so both modes share one code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .eigen_core import HeckeSeed, SeedError, lambda_prime_powers, spin_poly
from .graded import ONE, ZERO, GradedRational, is_exact

try:  # C rationals for the even-grade fast path
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

FLOAT_MERGE_TOL = 1e-9


def _to_q(coeffs: Sequence):
    """mpq images when every coefficient is an even-grade exact value, else None."""
    out = []
    for c in coeffs:
        if not isinstance(c, GradedRational) or c.rad != 1:
            return None
        out.append(_Q(c.q.numerator, c.q.denominator))
    return out


def _from_q(coeffs: Sequence) -> list:
    return [GradedRational(Fraction(int(c.numerator), int(c.denominator))) for c in coeffs]


class MalformedDenominator(ValueError):
    pass


class FactorizationMissing(ValueError):
    """Hadamard products need factored denominators; exact mode never guesses roots."""


def _zero_like(coeffs) -> object:
    for c in coeffs:
        if isinstance(c, complex):
            return 0j
        if isinstance(c, float):
            return 0.0
        if isinstance(c, _Q):
            return _Q(0)
    return ZERO


def _is_zero(x, tol: float = 0.0) -> bool:
    if is_exact(x):
        return x == 0
    return abs(x) <= tol


def poly_trim(coeffs: Sequence, tol: float = 0.0) -> list:
    out = list(coeffs)
    while len(out) > 1 and _is_zero(out[-1], tol):
        out.pop()
    return out


def poly_degree(coeffs: Sequence, tol: float = 0.0) -> int:
    out = poly_trim(coeffs, tol)
    if len(out) == 1 and _is_zero(out[0], tol):
        return -1
    return len(out) - 1


def poly_mul(a: Sequence, b: Sequence, limit: int | None = None) -> list:
    n = len(a) + len(b) - 1
    if limit is not None:
        n = min(n, limit + 1)
    qa, qb = _to_q(a), _to_q(b)
    if qa is not None and qb is not None:
        return _from_q(_poly_mul_raw(qa, qb, n, _Q(0)))
    return _poly_mul_raw(a, b, n, _zero_like(list(a) + list(b)))


def _poly_mul_raw(a: Sequence, b: Sequence, n: int, zero) -> list:
    out = [zero] * n
    for i, x in enumerate(a):
        if i >= n:
            break
        if _is_zero(x):
            continue
        for j, y in enumerate(b):
            if i + j >= n:
                break
            out[i + j] = out[i + j] + x * y
    return out


def poly_sub(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    zero = _zero_like(list(a) + list(b))
    a = list(a) + [zero] * (n - len(a))
    b = list(b) + [zero] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def poly_eval(coeffs: Sequence, x):
    acc = _zero_like(coeffs)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def expand_factored(factors: Sequence[tuple[object, int]]) -> list:
    """Coefficients of prod (1 - alpha T)^mult."""
    out: list = [ONE if all(is_exact(a) for a, _ in factors) else 1.0]
    for alpha, mult in factors:
        for _ in range(mult):
            out = poly_mul(out, [out[0] * 0 + 1, -alpha])
    return out


@dataclass(frozen=True)
class RationalGF:
    num: tuple
    den: tuple
    factored_den: Optional[tuple] = None

    def __init__(self, num, den, factored_den=None):
        den = tuple(den)
        if not den or _is_zero(den[0]):
            raise MalformedDenominator("constant term of the denominator is zero")
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", den)
        object.__setattr__(
            self, "factored_den", None if factored_den is None else tuple((a, int(m)) for a, m in factored_den)
        )

    @property
    def exact(self) -> bool:
        return all(is_exact(c) for c in self.num + self.den)

    def factorization_residual(self) -> float:
        """max |expand(factored_den) - den|; 0 when exact factors reproduce den."""
        if self.factored_den is None:
            raise FactorizationMissing("no factored denominator")
        diff = poly_sub(expand_factored(self.factored_den), self.den)
        if all(is_exact(d) for d in diff):
            return 0.0 if all(d == 0 for d in diff) else math.inf
        return max(abs(complex(d)) for d in diff)


def series_coeffs(gf: RationalGF, N: int) -> list:
    """First N+1 power-series coefficients of num/den."""
    num, den = gf.num, gf.den
    if _is_zero(den[0]):
        raise MalformedDenominator("constant term of the denominator is zero")
    qn, qd = _to_q(num), _to_q(den)
    if qn is not None and qd is not None:
        return _from_q(_series_q(qn, qd, N))
    zero = _zero_like(num + den)
    d0 = den[0]
    unit = is_exact(d0) and d0 == 1
    out: list = []
    for n in range(N + 1):
        s = num[n] if n < len(num) else zero
        s = s + zero
        for k in range(1, min(n, len(den) - 1) + 1):
            dk = den[k]
            if not _is_zero(dk):
                s = s - dk * out[n - k]
        out.append(s if unit else s / d0)
    return out


def _series_q(num: list, den: list, N: int) -> list:
    zero = _Q(0)
    d0 = den[0]
    out: list = []
    for n in range(N + 1):
        acc = num[n] if n < len(num) else zero
        for k in range(1, min(n, len(den) - 1) + 1):
            if den[k]:
                acc = acc - den[k] * out[n - k]
        out.append(acc / d0 if d0 != 1 else acc)
    return out


def _same(x, y, tol: float) -> bool:
    if is_exact(x) and is_exact(y):
        return x == y
    return abs(complex(x) - complex(y)) <= tol


def merge_roots(roots: Sequence[tuple[object, int]], tol: float = FLOAT_MERGE_TOL) -> list:
    """Merge equal roots (exactly, or within tol in float) adding multiplicities."""
    merged: list[list] = []
    for alpha, mult in roots:
        for entry in merged:
            if _same(entry[0], alpha, tol):
                entry[1] += mult
                break
        else:
            merged.append([alpha, mult])
    return [(a, m) for a, m in merged]


def _realify(coeffs: list, tol: float) -> list:
    if not any(isinstance(c, complex) for c in coeffs):
        return coeffs
    scale = max(1.0, max(abs(c) for c in coeffs))
    if all(abs(complex(c).imag) <= tol * scale for c in coeffs):
        return [complex(c).real for c in coeffs]
    return coeffs


def _exact_image(coeffs: Sequence) -> list:
    out = []
    for c in coeffs:
        if isinstance(c, complex):
            if c.imag != 0:
                raise ValueError("exact precision needs real coefficients")
            c = c.real
        out.append(c if is_exact(c) else GradedRational(Fraction(c)))
    return out


def hadamard(gf1: RationalGF, gf2: RationalGF, tol: float = FLOAT_MERGE_TOL, precision: str = "float") -> RationalGF:
    """Coefficientwise product of two rational series as a rational series.

    The denominator is prod (1 - a_i b_j T)^(l_i m_j) from the factored
    denominators; the numerator is recovered by multiplying the product
    series by that denominator and truncating below its degree.

    With ``precision="exact"`` float inputs are replaced by their lossless
    rational images and the same product is formed from power sums of the
    two denominators, so no rounding enters; the float root products are
    kept as ``factored_den`` for reference.  Float denominators of degree
    16 cannot carry high coefficients accurately when the root products
    cluster, which is what this mode is for.
    """
    if gf1.factored_den is None or gf2.factored_den is None:
        raise FactorizationMissing("hadamard needs factored denominators on both inputs")
    if precision not in ("float", "exact"):
        raise ValueError(f"unknown precision {precision!r}")
    for gf in (gf1, gf2):
        if poly_degree(gf.num) >= poly_degree(gf.den):
            raise ValueError("hadamard needs deg(num) < deg(den)")
    products = [(a * b, l * m) for a, l in gf1.factored_den for b, m in gf2.factored_den]
    merged = merge_roots(products, tol)
    if precision == "exact" and not (gf1.exact and gf2.exact):
        e1 = RationalGF(_exact_image(gf1.num), _exact_image(poly_trim(gf1.den)))
        e2 = RationalGF(_exact_image(gf2.num), _exact_image(poly_trim(gf2.den)))
        d1 = [c / e1.den[0] for c in e1.den]
        d2 = [c / e2.den[0] for c in e2.den]
        den = tensor_denominator(d1, d2)
        s1, s2 = series_coeffs(e1, len(den) - 1), series_coeffs(e2, len(den) - 1)
    else:
        den = expand_factored(merged)
        s1 = series_coeffs(gf1, len(den) - 1)
        s2 = series_coeffs(gf2, len(den) - 1)
    D = len(den) - 1
    prod = [x * y for x, y in zip(s1, s2)]
    num = poly_mul(prod, den, limit=D - 1) if D > 0 else prod[:1]
    den = _realify(den, tol)
    num = _realify(num, tol)
    num = poly_trim(num, 0.0 if all(is_exact(c) for c in num) else 1e-12)
    return RationalGF(num, den, merged)


# -- exact root helpers -------------------------------------------------------


def rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def exact_spin_roots(seed: HeckeSeed) -> list | None:
    """Exact reciprocal roots of the spin polynomial when they are rational.

    Returns None when any root is irrational (the usual case); callers then
    fall back to factorization-free routes.
    """
    if not seed.exact or seed.lam_p.rad != 1 or seed.c.rad != 1:
        return None
    a, c = seed.lam_p.q, seed.c.q
    s = rational_sqrt(a * a - 4 * (c - 2))
    if s is None:
        return None
    roots = []
    for w in ((a + s) / 2, (a - s) / 2):
        t = rational_sqrt(w * w - 4)
        if t is None:
            return None
        roots += [(GradedRational((w + t) / 2), 1), (GradedRational((w - t) / 2), 1)]
    return merge_roots(roots)


def float_spin_roots(seed: HeckeSeed) -> list:
    """Complex reciprocal roots from (u, v); valid for any float seed."""
    import cmath

    out = []
    for w in seed.satake_uv():
        d = cmath.sqrt(w * w - 4.0)
        out += [((w + d) / 2.0, 1), ((w - d) / 2.0, 1)]
    return out


def local_spin_gf(seed: HeckeSeed, factor: bool = True) -> RationalGF:
    """sum lambda(p^n) T^n = (1 - T^2/p) / spin_poly(T)."""
    inv_p = seed.inv_p
    zero = ZERO if seed.exact else 0.0
    one = ONE if seed.exact else 1.0
    num = [one, zero, -inv_p]
    den = spin_poly(seed)
    fac = None
    if factor:
        fac = exact_spin_roots(seed) if seed.exact else float_spin_roots(seed)
    return RationalGF(num, den, fac)


# -- Rankin-Selberg local factors ---------------------------------------------


def power_sums(den: Sequence, m: int) -> list:
    """p_k = sum alpha_i^k for k = 1..m from den = prod(1 - alpha_i T).

    Uses -T d'/d = sum_k p_k T^k.
    """
    zero = _zero_like(den)
    d = list(den) + [zero] * max(0, m + 1 - len(den))
    ps = [zero]
    for k in range(1, m + 1):
        s = -(d[k] * k)
        for i in range(1, k):
            s = s - d[i] * ps[k - i]
        ps.append(s)
    return ps


def from_power_sums(ps: Sequence, m: int) -> list:
    """Inverse of ``power_sums``: den of degree m with the given power sums."""
    zero = _zero_like(ps)
    one = ONE if isinstance(zero, GradedRational) else zero + 1
    d = [one]
    for k in range(1, m + 1):
        s = zero
        for i in range(1, k + 1):
            s = s + ps[i] * d[k - i]
        d.append(-(s / k))
    return d


def tensor_denominator(den1: Sequence, den2: Sequence) -> list:
    """prod_{i,j} (1 - a_i b_j T) computed from coefficients alone."""
    m1, m2 = len(den1) - 1, len(den2) - 1
    m = m1 * m2
    q1, q2 = _to_q(den1), _to_q(den2)
    if q1 is not None and q2 is not None:
        p1, p2 = power_sums(q1, m), power_sums(q2, m)
        return _from_q(from_power_sums([x * y for x, y in zip(p1, p2)], m))
    p1 = power_sums(den1, m)
    p2 = power_sums(den2, m)
    return from_power_sums([x * y for x, y in zip(p1, p2)], m)


@dataclass(frozen=True)
class LocalRankinFactor:
    p: int
    gp: tuple
    den: tuple
    den_roots: Optional[tuple] = None

    @property
    def exact(self) -> bool:
        return all(is_exact(c) for c in self.gp + self.den)

    @property
    def degree(self) -> int:
        return poly_degree(self.gp, 0.0 if self.exact else 1e-12)


def local_rankin_factor(seedF: HeckeSeed, seedG: HeckeSeed, tol: float = FLOAT_MERGE_TOL) -> LocalRankinFactor:
    """g_p and the degree-16 denominator with
    sum lambda_F(p^n) lambda_G(p^n) T^n = g_p(T) / prod (1 - a_i b_j T).
    """
    if seedF.p != seedG.p:
        raise SeedError(f"seeds at different primes {seedF.p} and {seedG.p}")
    if seedF.exact and seedG.exact:
        den = tensor_denominator(spin_poly(seedF), spin_poly(seedG))
        D = len(den) - 1
        lf = lambda_prime_powers(seedF, D)
        lg = lambda_prime_powers(seedG, D)
        prod = [x * y for x, y in zip(lf, lg)]
        gp = poly_trim(poly_mul(prod, den, limit=D - 1))
        rf, rg = exact_spin_roots(seedF), exact_spin_roots(seedG)
        roots = None
        if rf is not None and rg is not None:
            roots = tuple(merge_roots([(a * b, l * m) for a, l in rf for b, m in rg]))
        return LocalRankinFactor(seedF.p, tuple(gp), tuple(den), roots)
    # Float seeds: the degree-16 data is badly conditioned when root
    # products cluster, so it is formed exactly on the lossless images and
    # rounded once.  The float root products are kept for reference.
    fF, fG = seedF.to_float(), seedG.to_float()
    ex = local_rankin_factor(fF.to_exact(), fG.to_exact())
    gp = poly_trim([float(c) for c in ex.gp], 0.0)
    den = [float(c) for c in ex.den]
    roots = merge_roots([(a * b, l * m) for a, l in float_spin_roots(fF) for b, m in float_spin_roots(fG)], tol)
    return LocalRankinFactor(seedF.p, tuple(gp), tuple(den), tuple(roots))

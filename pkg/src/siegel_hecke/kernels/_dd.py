"""Double-double helpers (hi + lo pairs) without FMA, after Dekker.

Written with plain arithmetic so the same functions serve numpy arrays
and, wrapped in ``njit``, numba scalars.  The four-term recurrence runs
in this arithmetic: with roots clustered near +-1 plain doubles lose
about n^3 ulps by n = 64, well above the 1e-10 relative level.
"""

SPLITTER = 134217729.0  # 2^27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def split(a):
    t = SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def dd_add(xh, xl, yh, yl):
    s, e = two_sum(xh, yh)
    return quick_two_sum(s, e + (xl + yl))


def dd_mul(xh, xl, yh, yl):
    p, e = two_prod(xh, yh)
    return quick_two_sum(p, e + (xh * yl + xl * yh))


def dd_recip_int(p):
    """1/p for an integer-valued double p, as a double-double."""
    h = 1.0 / p
    ph, pl = two_prod(p, h)
    return h, ((1.0 - ph) - pl) / p

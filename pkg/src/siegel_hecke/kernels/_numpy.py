"""Pure numpy implementations of the float hot loops.

Every function here has a twin of the same name and signature in
``_numba``; the two are checked against each other in the test suite.
"""

from __future__ import annotations

import numpy as np

from . import _dd


def recurrence_table(a, b, inv_p, nmax):
    """lambda(p^n) for n = 0..nmax, one row per seed.

    a = lambda(p), b = lambda(p^2), inv_p = 1/p (p an integer), all float
    arrays of equal length.  Rows follow the four-term Hecke recurrence,
    evaluated in double-double arithmetic and rounded once at the end.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    p = np.rint(1.0 / np.asarray(inv_p, dtype=np.float64))
    m = a.shape[0]
    hi = np.zeros((m, nmax + 1), dtype=np.float64)
    lo = np.zeros((m, nmax + 1), dtype=np.float64)
    hi[:, 0] = 1.0
    if nmax >= 1:
        hi[:, 1] = a
    if nmax >= 2:
        hi[:, 2] = b
    # c = a^2 - b - 1/p
    ih, il = _dd.dd_recip_int(p)
    ch, cl = _dd.two_prod(a, a)
    ch, cl = _dd.dd_add(ch, cl, -b, np.zeros_like(b))
    ch, cl = _dd.dd_add(ch, cl, -ih, -il)
    zero = np.zeros_like(a)
    for n in range(3, nmax + 1):
        vh, vl = _dd.dd_mul(hi[:, n - 1], lo[:, n - 1], a, zero)
        th, tl = _dd.dd_mul(hi[:, n - 2], lo[:, n - 2], ch, cl)
        vh, vl = _dd.dd_add(vh, vl, -th, -tl)
        th, tl = _dd.dd_mul(hi[:, n - 3], lo[:, n - 3], a, zero)
        vh, vl = _dd.dd_add(vh, vl, th, tl)
        if n >= 4:
            vh, vl = _dd.dd_add(vh, vl, -hi[:, n - 4], -lo[:, n - 4])
        hi[:, n] = vh
        lo[:, n] = vl
    return hi + lo


def multiplicative_table(N, primes, pp_values):
    """Extend prime-power values to lambda(n) for 0 <= n <= N.

    pp_values[i, k] = lambda(primes[i]^k); index 0 of the result is 0.
    """
    vals = np.ones(N + 1, dtype=np.float64)
    vals[0] = 0.0
    kmax = pp_values.shape[1] - 1
    covered = np.zeros(N + 1, dtype=bool)
    covered[:2] = True
    for p in primes:
        if p <= N:
            covered[int(p) :: int(p)] = True
    if not covered.all():
        raise ValueError(f"no prime supplied dividing {int(np.argmin(covered))}")
    for i in range(primes.shape[0]):
        p = int(primes[i])
        if p > N:
            break
        count = N // p
        expo = np.ones(count, dtype=np.int64)
        pk = p * p
        step = p
        while pk <= N:
            # positions (1-based multiples of p) divisible by p^k
            expo[step - 1 :: step] += 1
            pk *= p
            step *= p
        if expo.max() > kmax:
            raise ValueError("pp_values too short for cutoff")
        vals[p::p] *= pp_values[i, expo]
    return vals


def dirichlet_convolve(x, y):
    """Dirichlet convolution on arrays indexed 1..N (index 0 ignored)."""
    N = x.shape[0] - 1
    out = np.zeros(N + 1, dtype=np.result_type(x, y))
    for d in range(1, N + 1):
        xd = x[d]
        if xd == 0:
            continue
        out[d::d] += xd * y[1 : N // d + 1]
    return out


def first_joint_nonzero(tf, tg, tol):
    """Smallest n >= 1 with |tf[:, n] * tg[:, n]| > tol, or -1 if none."""
    prod = np.abs(tf[:, 1:] * tg[:, 1:]) > tol
    hit = prod.any(axis=1)
    idx = np.argmax(prod, axis=1) + 1
    return np.where(hit, idx, -1).astype(np.int64)


def min_abs_prefix(tf, tg, upto):
    """min over 1 <= n <= upto[i] of |tf[i, n] tg[i, n]| (inf if upto < 1)."""
    prod = np.abs(tf[:, 1:] * tg[:, 1:])
    cols = np.arange(1, prod.shape[1] + 1)
    mask = cols[None, :] <= upto[:, None]
    return np.where(mask, prod, np.inf).min(axis=1)


def sign_counts(vals, tol):
    """(pos, neg, zero) counts of vals[1:] under a symmetric zero band."""
    v = vals[1:]
    pos = int(np.count_nonzero(v > tol))
    neg = int(np.count_nonzero(v < -tol))
    return pos, neg, v.shape[0] - pos - neg

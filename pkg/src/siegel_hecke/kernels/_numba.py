"""numba-compiled twins of the kernels in ``_numpy``."""

from __future__ import annotations

import numba as nb
import numpy as np

from . import _dd

njit_kwargs = {"nogil": True, "cache": True}


# leaf helpers compile as-is; the composite ones are restated below so that
# numba resolves their callees to the compiled versions
_two_sum = nb.njit(inline="always")(_dd.two_sum)
_quick_two_sum = nb.njit(inline="always")(_dd.quick_two_sum)
_split = nb.njit(inline="always")(_dd.split)


@nb.njit(inline="always")
def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@nb.njit(inline="always")
def _dd_add(xh, xl, yh, yl):
    s, e = _two_sum(xh, yh)
    return _quick_two_sum(s, e + (xl + yl))


@nb.njit(inline="always")
def _dd_mul(xh, xl, yh, yl):
    p, e = _two_prod(xh, yh)
    return _quick_two_sum(p, e + (xh * yl + xl * yh))


@nb.njit(**njit_kwargs)
def _recurrence_table(a, b, inv_p, nmax):
    m = a.shape[0]
    out = np.zeros((m, nmax + 1))
    hi = np.zeros(nmax + 1)
    lo = np.zeros(nmax + 1)
    for i in range(m):
        ai = a[i]
        p = np.rint(1.0 / inv_p[i])
        ih = 1.0 / p
        ph, pl = _two_prod(p, ih)
        il = ((1.0 - ph) - pl) / p
        ch, cl = _two_prod(ai, ai)
        ch, cl = _dd_add(ch, cl, -b[i], 0.0)
        ch, cl = _dd_add(ch, cl, -ih, -il)
        hi[:] = 0.0
        lo[:] = 0.0
        hi[0] = 1.0
        if nmax >= 1:
            hi[1] = ai
        if nmax >= 2:
            hi[2] = b[i]
        for n in range(3, nmax + 1):
            vh, vl = _dd_mul(hi[n - 1], lo[n - 1], ai, 0.0)
            th, tl = _dd_mul(hi[n - 2], lo[n - 2], ch, cl)
            vh, vl = _dd_add(vh, vl, -th, -tl)
            th, tl = _dd_mul(hi[n - 3], lo[n - 3], ai, 0.0)
            vh, vl = _dd_add(vh, vl, th, tl)
            if n >= 4:
                vh, vl = _dd_add(vh, vl, -hi[n - 4], -lo[n - 4])
            hi[n] = vh
            lo[n] = vl
        for n in range(nmax + 1):
            out[i, n] = hi[n] + lo[n]
    return out


def recurrence_table(a, b, inv_p, nmax):
    return _recurrence_table(
        np.ascontiguousarray(a, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.float64),
        np.ascontiguousarray(inv_p, dtype=np.float64),
        int(nmax),
    )


@nb.njit(**njit_kwargs)
def _multiplicative_table(N, primes, pp_values):
    nprimes = primes.shape[0]
    pmax = 1
    for i in range(nprimes):
        if primes[i] <= N:
            pmax = primes[i]
    index = np.full(pmax + 1, -1, dtype=np.int64)
    for i in range(nprimes):
        if primes[i] <= N:
            index[primes[i]] = i
    # smallest prime factor sieve restricted to the supplied primes
    spf = np.zeros(N + 1, dtype=np.int64)
    for i in range(nprimes):
        p = primes[i]
        if p > N:
            break
        for m in range(p, N + 1, p):
            if spf[m] == 0:
                spf[m] = p
    kmax = pp_values.shape[1] - 1
    vals = np.zeros(N + 1)
    if N >= 1:
        vals[1] = 1.0
    for n in range(2, N + 1):
        p = spf[n]
        if p == 0:
            return vals, n
        m = n
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        if k > kmax:
            return vals, -n
        vals[n] = pp_values[index[p], k] * vals[m]
    return vals, 0


def multiplicative_table(N, primes, pp_values):
    vals, status = _multiplicative_table(
        int(N),
        np.ascontiguousarray(primes, dtype=np.int64),
        np.ascontiguousarray(pp_values, dtype=np.float64),
    )
    if status > 0:
        raise ValueError(f"no prime supplied dividing {status}")
    if status < 0:
        raise ValueError("pp_values too short for cutoff")
    return vals


@nb.njit(**njit_kwargs)
def _dirichlet_convolve(x, y):
    N = x.shape[0] - 1
    out = np.zeros(N + 1)
    for d in range(1, N + 1):
        xd = x[d]
        if xd == 0.0:
            continue
        for m in range(1, N // d + 1):
            out[d * m] += xd * y[m]
    return out


def dirichlet_convolve(x, y):
    return _dirichlet_convolve(
        np.ascontiguousarray(x, dtype=np.float64), np.ascontiguousarray(y, dtype=np.float64)
    )


@nb.njit(**njit_kwargs)
def _first_joint_nonzero(tf, tg, tol):
    m, ncol = tf.shape
    out = np.full(m, -1, dtype=np.int64)
    for i in range(m):
        for n in range(1, ncol):
            if abs(tf[i, n] * tg[i, n]) > tol:
                out[i] = n
                break
    return out


def first_joint_nonzero(tf, tg, tol):
    return _first_joint_nonzero(
        np.ascontiguousarray(tf, dtype=np.float64),
        np.ascontiguousarray(tg, dtype=np.float64),
        float(tol),
    )


@nb.njit(**njit_kwargs)
def _min_abs_prefix(tf, tg, upto):
    m, ncol = tf.shape
    out = np.full(m, np.inf)
    for i in range(m):
        for n in range(1, min(upto[i], ncol - 1) + 1):
            v = abs(tf[i, n] * tg[i, n])
            if v < out[i]:
                out[i] = v
    return out


def min_abs_prefix(tf, tg, upto):
    return _min_abs_prefix(
        np.ascontiguousarray(tf, dtype=np.float64),
        np.ascontiguousarray(tg, dtype=np.float64),
        np.ascontiguousarray(upto, dtype=np.int64),
    )


@nb.njit(**njit_kwargs)
def _sign_counts(vals, tol):
    pos = 0
    neg = 0
    for n in range(1, vals.shape[0]):
        v = vals[n]
        if v > tol:
            pos += 1
        elif v < -tol:
            neg += 1
    return pos, neg, vals.shape[0] - 1 - pos - neg


def sign_counts(vals, tol):
    pos, neg, zero = _sign_counts(np.ascontiguousarray(vals, dtype=np.float64), float(tol))
    return int(pos), int(neg), int(zero)

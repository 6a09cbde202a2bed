"""Small prime utilities backed by a numpy sieve."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def sieve(n: int) -> np.ndarray:
    """Boolean primality mask of length n+1."""
    mask = np.ones(max(n + 1, 2), dtype=bool)
    mask[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if mask[i]:
            mask[i * i :: i] = False
    return mask[: n + 1]


@lru_cache(maxsize=16)
def _primes_upto(n: int) -> tuple[int, ...]:
    return tuple(int(p) for p in np.flatnonzero(sieve(n)))


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    return list(_primes_upto(int(n)))


def prime_array(n: int) -> np.ndarray:
    return np.flatnonzero(sieve(n)).astype(np.int64)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def smallest_prime_factor(n: int) -> np.ndarray:
    """spf[m] for 0 <= m <= n (spf[0] = spf[1] = 0)."""
    spf = np.zeros(n + 1, dtype=np.int64)
    for i in range(2, int(n**0.5) + 1):
        if spf[i] == 0:
            seg = spf[i * i :: i]
            seg[seg == 0] = i
    idx = np.arange(n + 1, dtype=np.int64)
    rest = (spf == 0) & (idx >= 2)
    spf[rest] = idx[rest]
    return spf


def factorize(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def prime_pi(x: int) -> int:
    return len(primes_upto(x))

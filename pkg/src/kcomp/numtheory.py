"""Elementary number theory shared by the rest of the package.

A single prime table is sieved once (lazily, under a lock) and reused by every
call. Everything here is exact: Python ints never overflow.
"""

from __future__ import annotations

import math
import threading
from functools import lru_cache
from typing import NamedTuple

import numpy as np

DEFAULT_SIEVE_BOUND = 10**6


class PrimePower(NamedTuple):
    prime: int
    exponent: int


Factorization = tuple[PrimePower, ...]


class _PrimeTable:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.bound = 0
        self.primes: np.ndarray = np.zeros(0, dtype=np.int64)
        self._primes_list: list[int] = []

    def ensure(self, bound: int) -> None:
        if bound <= self.bound:
            return
        with self._lock:
            if bound <= self.bound:
                return
            primes = sieve(max(bound, DEFAULT_SIEVE_BOUND))
            self._primes_list = primes.tolist()
            self.primes = primes
            self.bound = max(bound, DEFAULT_SIEVE_BOUND)

    def primes_list(self) -> list[int]:
        self.ensure(DEFAULT_SIEVE_BOUND)
        return self._primes_list


_TABLE = _PrimeTable()


def sieve(limit: int) -> np.ndarray:
    """Sieve of Eratosthenes; returns an int64 array of primes <= limit."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def smallest_prime_factors(limit: int) -> np.ndarray:
    """spf[m] = smallest prime dividing m, for 2 <= m <= limit (spf[0]=0, spf[1]=1)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 1:
        spf[1] = 1
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    return spf


def primes_up_to(limit: int) -> list[int]:
    if limit < 2:
        return []
    _TABLE.ensure(limit)
    primes = _TABLE.primes
    return primes[: np.searchsorted(primes, limit, side="right")].tolist()


def prime_array(limit: int) -> np.ndarray:
    """Same as :func:`primes_up_to` but as a read-only int64 array."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    _TABLE.ensure(limit)
    out = _TABLE.primes[: np.searchsorted(_TABLE.primes, limit, side="right")]
    out.flags.writeable = False
    return out


def factorize(n: int) -> Factorization:
    """Prime factorization as ascending (prime, exponent) pairs; () for n = 1.

    Trial division by the sieved primes. A cofactor left over once p*p
    exceeds it is prime. Inputs whose cofactor survives every sieved prime
    continue with odd trial divisors past the sieve bound (slow, but exact).
    """
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    return _factorize_cached(int(n))


@lru_cache(maxsize=1 << 16)
def _factorize_cached(n: int) -> Factorization:
    out: list[PrimePower] = []
    m = n
    for p in _TABLE.primes_list():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append(PrimePower(p, e))
    else:
        p = _TABLE.bound | 1
        while p * p <= m:
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                out.append(PrimePower(p, e))
            p += 2
    if m > 1:
        out.append(PrimePower(m, 1))
    return tuple(out)


def prime_divisors(n: int) -> list[int]:
    return [pp.prime for pp in factorize(n)]


def reconstruct(fac: Factorization) -> int:
    out = 1
    for p, e in fac:
        out *= p**e
    return out


def omega(n: int) -> int:
    """Number of distinct prime factors."""
    return len(factorize(n))


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n))


def mobius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def jordan_totient(t: int, n: int) -> int:
    """J_t(n) = n^t * prod_{p | n} (1 - p^-t), computed as an exact integer."""
    if t < 1 or n < 1:
        raise ValueError("jordan_totient needs t >= 1 and n >= 1")
    out = 1
    for p, e in factorize(n):
        out *= p ** (t * (e - 1)) * (p**t - 1)
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def binomial(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=None)
def _stirling_row(n: int) -> tuple[int, ...]:
    if n == 0:
        return (1,)
    prev = _stirling_row(n - 1)
    m = n - 1
    # s(n, k) = s(n-1, k-1) - (n-1) s(n-1, k)
    row = [0] * (n + 1)
    for k in range(1, n + 1):
        left = prev[k - 1]
        right = prev[k] if k <= m else 0
        row[k] = left - m * right
    return tuple(row)


def stirling_first_signed(n: int, k: int) -> int:
    """Signed Stirling numbers of the first kind, s(n, k)."""
    if n < 0 or k < 0:
        raise ValueError("stirling_first_signed needs n, k >= 0")
    if k > n:
        return 0
    return _stirling_row(n)[k]

"""Pure-numpy versions of the compiled kernels.

Same signatures and results as numba_kernels. The algorithms differ where
vectorisation pays: brute_count vectorises the last two coordinates, and the
divisor / reciprocal sums work on a dense grid over [1, M]^k.
"""

from __future__ import annotations

import math
from functools import reduce
from itertools import combinations

import numpy as np

ALL = 0
SPLIT = 1
TWISE = 2


def _prime_set(v: int, spf: np.ndarray) -> list[int]:
    out = []
    while v > 1:
        p = int(spf[v])
        while v % p == 0:
            v //= p
        out.append(p)
    return out


def _placed_ok(x: list[int], kind: int, param: int, spf: np.ndarray) -> bool:
    d = len(x) - 1
    v = x[d]
    if kind == SPLIT:
        return d < param or all(math.gcd(v, x[i]) == 1 for i in range(param))
    if kind == TWISE:
        if param == 2:
            return all(math.gcd(v, x[i]) == 1 for i in range(d))
        for p in _prime_set(v, spf):
            if 1 + sum(1 for i in range(d) if x[i] % p == 0) >= param:
                return False
    return True


def _prefixes(n: int, depth: int, kind: int, param: int, spf: np.ndarray):
    # admissible x[0..depth-1] leaving room for two more positive parts
    def rec(prefix: list[int], rem: int):
        if len(prefix) == depth:
            yield prefix, rem
            return
        left = depth - len(prefix) + 1
        for v in range(1, rem - left + 1):
            prefix.append(v)
            if _placed_ok(prefix, kind, param, spf):
                yield from rec(prefix, rem - v)
            prefix.pop()

    yield from rec([], n)


def _coprime_mask(arr: np.ndarray, v: int, spf: np.ndarray) -> np.ndarray:
    mask = np.ones(arr.shape, dtype=bool)
    for p in _prime_set(v, spf):
        mask &= arr % p != 0
    return mask


def _tail_mask(prefix, rem, xa, xb, k, kind, param, spf):
    # gcd(xa, xb) = gcd(xa, rem) since xb = rem - xa
    if kind == ALL:
        g = reduce(math.gcd, prefix, rem)
        return _coprime_mask(xa, g, spf)
    mask = np.ones(xa.shape, dtype=bool)
    if kind == SPLIT:
        left = [v for i, v in enumerate(prefix) if i < param]
        # x_{k-1} always sits in the right block
        for v in left:
            mask &= _coprime_mask(xb, v, spf)
        if k - 2 < param:
            mask &= _coprime_mask(xa, rem, spf)
        else:
            for v in left:
                mask &= _coprime_mask(xa, v, spf)
        return mask
    if param == 2:
        for v in prefix:
            mask &= _coprime_mask(xa, v, spf) & _coprime_mask(xb, v, spf)
        return mask & _coprime_mask(xa, rem, spf)
    # t >= 3: only primes already hitting >= t-2 prefix parts can reach t
    counts: dict[int, int] = {}
    for v in prefix:
        for p in _prime_set(v, spf):
            counts[p] = counts.get(p, 0) + 1
    for p, c in counts.items():
        if c >= param - 2:
            hits = c + (xa % p == 0).astype(np.int64) + (xb % p == 0).astype(np.int64)
            mask &= hits < param
    return mask


def brute_count(n, k, kind, param, spf):
    if n < k:
        return 0
    total = 0
    for prefix, rem in _prefixes(n, k - 2, kind, param, spf):
        xa = np.arange(1, rem, dtype=np.int64)
        xb = rem - xa
        total += int(np.count_nonzero(_tail_mask(prefix, rem, xa, xb, k, kind, param, spf)))
    return total


def _exponent_rows(limit: int, spf: np.ndarray) -> tuple[list[int], np.ndarray]:
    """Primes p <= limit and E[r, j-1] = nu_p(j) for 1 <= j <= limit."""
    primes = [p for p in range(2, limit + 1) if spf[p] == p]
    js = np.arange(1, limit + 1, dtype=np.int64)
    rows = np.zeros((len(primes), limit), dtype=np.int64)
    for r, p in enumerate(primes):
        m = js.copy()
        while True:
            hit = m % p == 0
            if not hit.any():
                break
            rows[r] += hit
            m[hit] //= p
    return primes, rows


def multiplicative_grid(k: int, limit: int, table: np.ndarray, base: int, spf: np.ndarray) -> np.ndarray:
    """f(j) on the whole grid [1, limit]^k (axis i holds j_i - 1)."""
    grid = np.ones((limit,) * k, dtype=np.int64)
    _, rows = _exponent_rows(limit, spf)
    for e in rows:
        idx = np.zeros((1,) * k, dtype=np.int64)
        for i in range(k):
            shape = [1] * k
            shape[i] = limit
            idx = idx * base + e.reshape(shape)
        grid *= table[idx]
    return grid


def _axis_values(k: int, limit: int, i: int) -> np.ndarray:
    shape = [1] * k
    shape[i] = limit
    return np.arange(1, limit + 1, dtype=np.int64).reshape(shape)


def indicator_grid(k: int, limit: int, kind: int, param: int) -> np.ndarray:
    ok = np.ones((limit,) * k, dtype=bool)
    axes = [_axis_values(k, limit, i) for i in range(k)]
    if kind == SPLIT:
        for i in range(param):
            for j in range(param, k):
                ok &= np.gcd(axes[i], axes[j]) == 1
        return ok.astype(np.int64)
    for idx in combinations(range(k), param):
        g = axes[idx[0]]
        for i in idx[1:]:
            g = np.gcd(g, axes[i])
        ok &= g == 1
    return ok.astype(np.int64)


def divisor_sum_grid(grid: np.ndarray) -> np.ndarray:
    """Apply g(n) = sum_{d_i | n_i} f(d) along every axis."""
    limit = grid.shape[0]
    n = np.arange(1, limit + 1)
    zeta = (n[:, None] % n[None, :] == 0).astype(np.int64)
    out = grid
    for axis in range(grid.ndim):
        out = np.moveaxis(np.tensordot(zeta, out, axes=([1], [axis])), 0, axis)
    return out


def divisor_sums(tuples, k, table, base, spf, div_ptr=None, div_val=None):
    tuples = np.asarray(tuples, dtype=np.int64)
    if tuples.size == 0:
        return np.zeros(0, dtype=np.int64)
    limit = int(tuples.max())
    sums = divisor_sum_grid(multiplicative_grid(k, limit, table, base, spf))
    return sums[tuple((tuples - 1).T)]


def indicators(tuples, k, kind, param):
    tuples = np.asarray(tuples, dtype=np.int64)
    if tuples.size == 0:
        return np.zeros(0, dtype=np.int64)
    limit = int(tuples.max())
    return indicator_grid(k, limit, kind, param)[tuple((tuples - 1).T)]


def reciprocal_sum(k, j_bound, delta, table, base, spf):
    vals = multiplicative_grid(k, j_bound, table, base, spf).astype(np.float64)
    axes = [_axis_values(k, j_bound, i) for i in range(k)]
    g = axes[0]
    prod = axes[0].astype(np.float64)
    keep = np.gcd(axes[0], delta) == 1
    for a in axes[1:]:
        g = np.gcd(g, a)
        prod = prod * a
        keep = keep & (np.gcd(a, delta) == 1)
    keep = keep & (g == 1)
    terms = np.where(keep, vals / prod, 0.0)
    return math.fsum(terms.ravel().tolist())


def log_factor_sum(primes, deficit, expo):
    # deficit ascending: sum_i q_i u^(expo - i), u = 1/p
    u = 1.0 / np.asarray(primes, dtype=np.float64)
    acc = np.zeros_like(u)
    for q in deficit:
        acc = acc * u + q
    acc = acc * u ** (expo - len(deficit) + 1)
    factors = 1.0 - acc
    if not factors.size:
        return 0.0, 2.0, -1.0
    smallest, largest = float(factors.min()), float(factors.max())
    if smallest <= 0.0:
        return math.fsum(np.log1p(-acc[factors > 0]).tolist()), smallest, largest
    return math.fsum(np.log1p(-acc).tolist()), smallest, largest

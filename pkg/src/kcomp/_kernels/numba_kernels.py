"""Compiled inner loops. Every function here has a twin in numpy_kernels."""

from __future__ import annotations

import numpy as np
from numba import njit

ALL = 0
SPLIT = 1
TWISE = 2


@njit(cache=True, nogil=True)
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


MAXW = 16  # distinct primes of any int64 value


@njit(cache=True, nogil=True)
def _factor_into(v, spf, out, row):
    # distinct primes of v into out[row, :]; returns how many
    c = 0
    while v > 1:
        p = spf[v]
        while v % p == 0:
            v //= p
        out[row, c] = p
        c += 1
    return c


@njit(cache=True, nogil=True)
def _coprime_to_row(v, pr, npr, row):
    for r in range(npr[row]):
        if v % pr[row, r] == 0:
            return False
    return True


@njit(cache=True, nogil=True)
def _prefix_ok(x, d, kind, param, pr, npr):
    # x[d] against the placed x[0..d-1]; pr rows 0..d hold their prime sets
    v = x[d]
    if kind == SPLIT:
        if d >= param:
            for i in range(param):
                if not _coprime_to_row(v, pr, npr, i):
                    return False
        return True
    if kind == TWISE:
        if param == 2:
            for i in range(d):
                if not _coprime_to_row(v, pr, npr, i):
                    return False
            return True
        for r in range(npr[d]):
            p = pr[d, r]
            c = 1
            for i in range(d):
                if x[i] % p == 0:
                    c += 1
            if c >= param:
                return False
    return True


@njit(cache=True, nogil=True)
def _leaf_count(x, k, kind, param, rem, spf, pr, npr, h_pr, cand_p, cand_c, ncand):
    # place x[k-2] = v and x[k-1] = rem - v for every v in [1, rem-1]
    # gcd(v, rem - v) = gcd(v, rem), so the last pair is tested against rem's primes (row k-2)
    last = k - 1
    pre = k - 2
    count = 0
    for v in range(1, rem):
        w = rem - v
        if kind == ALL:
            # h = gcd(x[0], ..., x[k-3], rem); need gcd(h, v) == 1
            ok = True
            for r in range(h_pr.shape[0]):
                if h_pr[r] == 0:
                    break
                if v % h_pr[r] == 0:
                    ok = False
                    break
            if ok:
                count += 1
            continue
        if kind == SPLIT:
            if pre >= param:
                ok = True
                for i in range(param):
                    if not _coprime_to_row(v, pr, npr, i):
                        ok = False
                        break
                if not ok:
                    continue
            elif not _coprime_to_row(v, pr, npr, pre):
                continue
            ok = True
            for i in range(min(param, pre)):
                if not _coprime_to_row(w, pr, npr, i):
                    ok = False
                    break
            if ok:
                count += 1
            continue
        if param == 2:
            if not _coprime_to_row(v, pr, npr, pre):
                continue
            ok = True
            for i in range(pre):
                if not (_coprime_to_row(v, pr, npr, i) and _coprime_to_row(w, pr, npr, i)):
                    ok = False
                    break
            if ok:
                count += 1
            continue
        # t >= 3: only primes already dividing >= t-2 prefix parts can reach t
        ok = True
        for r in range(ncand):
            p = cand_p[r]
            c = cand_c[r]
            if v % p == 0:
                c += 1
            if w % p == 0:
                c += 1
            if c >= param:
                ok = False
                break
        if ok:
            count += 1
    return count


@njit(cache=True, nogil=True)
def brute_count(n, k, kind, param, spf):
    """Count k-compositions of n satisfying the constraint.

    Depth-first over x[0..k-3]; prefixes that already violate a pairwise or
    incidence condition are abandoned, then the last two parts are swept in
    _leaf_count. Coprimality is tested against stored prime sets (from spf)
    rather than with Euclid. The count fits int64: the caller checks
    C(n-1, k-1) first.
    """
    if n < k:
        return 0
    pre = k - 2
    x = np.zeros(k, np.int64)
    rem = np.zeros(k, np.int64)
    gs = np.zeros(k, np.int64)
    pr = np.zeros((k, MAXW), np.int64)
    npr = np.zeros(k, np.int64)
    h_pr = np.zeros(MAXW, np.int64)
    cand_p = np.zeros(k * MAXW, np.int64)
    cand_c = np.zeros(k * MAXW, np.int64)
    rem[0] = n
    count = 0
    d = 0
    while True:
        if d == pre:
            # prefix x[0..k-3] fixed: prepare leaf data, sweep, backtrack
            r = rem[pre]
            npr[pre] = _factor_into(r, spf, pr, pre)
            ncand = 0
            if kind == ALL:
                h = r
                if pre > 0:
                    h = _gcd(gs[pre - 1], r)
                h_pr[:] = 0
                v = h
                c = 0
                while v > 1:
                    p = spf[v]
                    while v % p == 0:
                        v //= p
                    h_pr[c] = p
                    c += 1
            elif kind == TWISE and param >= 3:
                for i in range(pre):
                    for j in range(npr[i]):
                        p = pr[i, j]
                        found = -1
                        for q in range(ncand):
                            if cand_p[q] == p:
                                found = q
                                break
                        if found < 0:
                            cand_p[ncand] = p
                            cand_c[ncand] = 1
                            ncand += 1
                        else:
                            cand_c[found] += 1
                m = 0
                for q in range(ncand):
                    if cand_c[q] >= param - 2:
                        cand_p[m] = cand_p[q]
                        cand_c[m] = cand_c[q]
                        m += 1
                ncand = m
            count += _leaf_count(x, k, kind, param, r, spf, pr, npr, h_pr, cand_p, cand_c, ncand)
            d -= 1
            if d < 0:
                break
            continue
        x[d] += 1
        # leave room for the remaining k-1-d parts
        if x[d] > rem[d] - (k - 1 - d):
            x[d] = 0
            d -= 1
            if d < 0:
                break
            continue
        npr[d] = _factor_into(x[d], spf, pr, d)
        if not _prefix_ok(x, d, kind, param, pr, npr):
            continue
        gs[d] = x[d] if d == 0 else _gcd(gs[d - 1], x[d])
        rem[d + 1] = rem[d] - x[d]
        d += 1
    return count


@njit(cache=True, nogil=True)
def _mult_eval(ds, k, table, base, spf, primes_buf):
    # f(ds) for a multiplicative f given by its flat local table
    nprimes = 0
    for i in range(k):
        m = ds[i]
        while m > 1:
            p = spf[m]
            while m % p == 0:
                m //= p
            seen = False
            for r in range(nprimes):
                if primes_buf[r] == p:
                    seen = True
                    break
            if not seen:
                primes_buf[nprimes] = p
                nprimes += 1
    val = 1
    for r in range(nprimes):
        p = primes_buf[r]
        idx = 0
        for i in range(k):
            e = 0
            m = ds[i]
            while m % p == 0:
                m //= p
                e += 1
            idx = idx * base + e
        val *= table[idx]
        if val == 0:
            return 0
    return val


@njit(cache=True, nogil=True)
def _indicator(ns, k, kind, param):
    if kind == SPLIT:
        for i in range(param):
            for j in range(param, k):
                if _gcd(ns[i], ns[j]) != 1:
                    return 0
        return 1
    # TWISE: every t-subset (bitmask with popcount t) must have gcd 1
    for mask in range(1 << k):
        c = 0
        g = 0
        for i in range(k):
            if mask >> i & 1:
                c += 1
                g = _gcd(g, ns[i])
        if c == param and g != 1:
            return 0
    return 1


@njit(cache=True, nogil=True)
def divisor_sums(tuples, k, table, base, spf, div_ptr, div_val):
    """For each row n of ``tuples``: sum over d_i | n_i of f(d), f from its local table."""
    m = tuples.shape[0]
    out = np.zeros(m, np.int64)
    ds = np.zeros(k, np.int64)
    pos = np.zeros(k, np.int64)
    buf = np.zeros(64 * k, np.int64)
    for r in range(m):
        for i in range(k):
            pos[i] = div_ptr[tuples[r, i]]
        total = 0
        while True:
            for i in range(k):
                ds[i] = div_val[pos[i]]
            total += _mult_eval(ds, k, table, base, spf, buf)
            i = k - 1
            while i >= 0:
                pos[i] += 1
                if pos[i] < div_ptr[tuples[r, i] + 1]:
                    break
                pos[i] = div_ptr[tuples[r, i]]
                i -= 1
            if i < 0:
                break
        out[r] = total
    return out


@njit(cache=True, nogil=True)
def indicators(tuples, k, kind, param):
    """theta (kind=SPLIT) or rho (kind=TWISE) by direct gcd tests."""
    m = tuples.shape[0]
    out = np.zeros(m, np.int64)
    for r in range(m):
        out[r] = _indicator(tuples[r], k, kind, param)
    return out


@njit(cache=True, nogil=True)
def reciprocal_sum(k, j_bound, delta, table, base, spf):
    """sum f(j)/(j_1...j_k) over j in [1, j_bound]^k, gcd(j)=1, gcd(j_i, delta)=1."""
    js = np.ones(k, np.int64)
    buf = np.zeros(64 * k, np.int64)
    total = 0.0
    comp = 0.0
    while True:
        ok = True
        g = 0
        prod = 1.0
        for i in range(k):
            if _gcd(js[i], delta) != 1:
                ok = False
                break
            g = _gcd(g, js[i])
            prod *= js[i]
        if ok and g == 1:
            v = _mult_eval(js, k, table, base, spf, buf)
            if v != 0:
                y = v / prod - comp
                t = total + y
                comp = (t - total) - y
                total = t
        i = k - 1
        while i >= 0:
            js[i] += 1
            if js[i] <= j_bound:
                break
            js[i] = 1
            i -= 1
        if i < 0:
            break
    return total


@njit(cache=True, nogil=True)
def log_factor_sum(primes, deficit, expo):
    """Kahan sum of log(1 - Q(p)/p^expo) over ``primes``, plus the extreme factors.

    ``deficit`` holds Q's coefficients (ascending). Q(p)/p^expo is evaluated
    by Horner in u = 1/p, so no intermediate exceeds O(1).
    """
    total = 0.0
    comp = 0.0
    smallest = 2.0
    largest = -1.0
    nq = deficit.shape[0]
    for r in range(primes.shape[0]):
        u = 1.0 / primes[r]
        # sum_i q_i u^(expo - i)
        acc = 0.0
        for i in range(nq):
            acc = acc * u + deficit[i]
        acc *= u ** (expo - nq + 1)
        f = 1.0 - acc
        if f < smallest:
            smallest = f
        if f > largest:
            largest = f
        if f <= 0.0:
            return total, f, largest
        y = np.log1p(-acc) - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total, smallest, largest

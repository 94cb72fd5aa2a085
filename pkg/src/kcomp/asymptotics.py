"""Euler-product constants, local correction factors and main-term predictions.

Every product here has local factors of the form 1 - Q(p)/p^e with an exact
integer polynomial Q. Primes up to ``head_bound`` are multiplied as exact
fractions; the remaining primes contribute through a compensated sum of
log(1 - Q(p)/p^e), evaluated in fixed-size chunks so the reduction order
(and therefore the result) does not depend on the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from kcomp import counting, multifunc, numtheory
from kcomp._kernels import get_backend
from kcomp.multifunc import CoprimalityConstraint
from kcomp.numtheory import binomial
from kcomp.polynomials import (
    ONE,
    X,
    H_local_factor,
    H_local_factor_direct,
    IntegerPolynomial,
    L_local_factor,
    L_local_factor_direct,
    build_F,
    build_G,
    eval_poly,
)

DEFAULT_PRIME_BOUND = 10**6
HEAD_BOUND = 1000
CHUNK_PRIMES = 1 << 14
PRECISION_DPS = 40


class FactorError(ArithmeticError):
    """A local Euler factor left its admissible range."""


@dataclass(frozen=True)
class EulerProductResult:
    value: mpmath.mpf
    prime_bound: int
    tail_bound_estimate: mpmath.mpf
    factor_count: int
    kind: str = ""
    k: int = 0
    param: int = 0


@dataclass(frozen=True)
class ResidualRow:
    n: int
    family: str
    k: int
    param: int
    exact_count: int
    main_term: mpmath.mpf
    residual: mpmath.mpf
    normalized_residual: mpmath.mpf


@dataclass(frozen=True)
class ScanResult:
    rows: list[ResidualRow]
    partial: bool
    stopped_at: int | None = None


def _mp():
    return mpmath.workdps(PRECISION_DPS)


def euler_product(
    deficit: IntegerPolynomial,
    expo: int,
    prime_bound: int,
    *,
    skip: Sequence[int] = (),
    unit_interval: bool = False,
    head_bound: int = HEAD_BOUND,
    threads: int = 1,
    backend: str | None = None,
    label: tuple[str, int, int] = ("", 0, 0),
) -> EulerProductResult:
    """prod over primes p <= prime_bound, p not in ``skip``, of 1 - Q(p)/p^expo.

    ``unit_interval`` additionally requires each factor to be at most 1.
    """
    if prime_bound < 2:
        raise ValueError("prime_bound must be >= 2")
    if deficit.degree > expo:
        raise ValueError("deficit degree exceeds the exponent")
    primes = numtheory.prime_array(prime_bound)
    if skip:
        primes = primes[~np.isin(primes, np.asarray(list(skip), dtype=np.int64))]
    head = primes[primes <= head_bound].tolist()
    tail = primes[primes > head_bound]

    exact = Fraction(1)
    for p in head:
        factor = 1 - Fraction(eval_poly(deficit, p), p**expo)
        _check_factor(factor, p, unit_interval, label)
        exact *= factor

    log_tail = 0.0
    if tail.size and deficit.degree >= 0:
        kern = get_backend(backend)
        q = np.asarray(deficit.coeffs, dtype=np.float64)
        bounds = range(0, tail.size, CHUNK_PRIMES)
        chunks = [tail[i : i + CHUNK_PRIMES] for i in bounds]

        def run(chunk):
            return kern.log_factor_sum(chunk, q, expo)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(run, chunks))
        else:
            parts = [run(c) for c in chunks]
        for _, smallest, largest in parts:
            if smallest <= 0.0 or (unit_interval and largest > 1.0):
                raise FactorError(f"{label}: tail factor outside range ({smallest}, {largest})")
        log_tail = math.fsum(s for s, _, _ in parts)

    with _mp():
        value = mpmath.mpf(exact.numerator) / exact.denominator * mpmath.exp(mpmath.mpf(log_tail))
        weight = sum(abs(c) for c in deficit.coeffs) if deficit.degree >= 0 else 0
        largest_p = int(primes[-1]) if primes.size else prime_bound
        tail_est = mpmath.mpf(weight) / (largest_p * mpmath.log(largest_p)) if weight else mpmath.mpf(0)
    return EulerProductResult(
        value=+value,
        prime_bound=prime_bound,
        tail_bound_estimate=tail_est,
        factor_count=int(primes.size),
        kind=label[0],
        k=label[1],
        param=label[2],
    )


def _check_factor(factor: Fraction, p: int, unit_interval: bool, label) -> None:
    if factor <= 0 or (unit_interval and factor > 1):
        raise FactorError(f"{label}: local factor {factor} at p={p} outside range")


# -- the constants -----------------------------------------------------------------


def _check_ks(k: int, s: int) -> None:
    if k < 3 or not 1 <= s <= k - 1:
        raise ValueError(f"need k >= 3 and 1 <= s <= k-1, got k={k}, s={s}")


def _check_kt(k: int, t: int) -> None:
    if k < 3 or not 2 <= t <= k:
        raise ValueError(f"need k >= 3 and 2 <= t <= k, got k={k}, t={t}")


def C_deficit(k: int, s: int) -> IntegerPolynomial:
    return build_F(k, s)


def D_deficit(k: int, t: int) -> IntegerPolynomial:
    return X ** (k - 1) - build_G(k, t)


def H_deficit(k: int, s: int) -> IntegerPolynomial:
    return X * build_F(k, s) + ONE * (-1) ** k


def L_deficit(k: int, t: int) -> IntegerPolynomial:
    return X**k - X * build_G(k, t) - ONE * ((-1) ** (k - t + 1) * binomial(k - 1, t - 1))


def constant_C(k: int, s: int, prime_bound: int = DEFAULT_PRIME_BOUND, **kw) -> EulerProductResult:
    """prod_p (1 - F_{k,s}(p) / p^(k-1))."""
    _check_ks(k, s)
    return euler_product(C_deficit(k, s), k - 1, prime_bound, unit_interval=True, label=("C", k, s), **kw)


def constant_D(k: int, t: int, prime_bound: int = DEFAULT_PRIME_BOUND, **kw) -> EulerProductResult:
    """prod_p G_{k,t}(p) / p^(k-1); identically 1 when t = k."""
    _check_kt(k, t)
    return euler_product(D_deficit(k, t), k - 1, prime_bound, unit_interval=True, label=("D", k, t), **kw)


def H_at_ones(k: int, s: int, prime_bound: int = DEFAULT_PRIME_BOUND, **kw) -> EulerProductResult:
    _check_ks(k, s)
    for p in numtheory.primes_up_to(min(prime_bound, HEAD_BOUND)):
        if H_local_factor(k, s, p) != H_local_factor_direct(k, s, p):
            raise FactorError(f"H_({k},{s}) factor identity fails at p={p}")
    return euler_product(H_deficit(k, s), k, prime_bound, label=("H", k, s), **kw)


def L_at_ones(k: int, t: int, prime_bound: int = DEFAULT_PRIME_BOUND, **kw) -> EulerProductResult:
    _check_kt(k, t)
    for p in numtheory.primes_up_to(min(prime_bound, HEAD_BOUND)):
        if L_local_factor(k, t, p) != L_local_factor_direct(k, t, p):
            raise FactorError(f"L_({k},{t}) factor identity fails at p={p}")
    return euler_product(L_deficit(k, t), k, prime_bound, label=("L", k, t), **kw)


# -- local corrections and main terms ------------------------------------------------


def f_prime_factor(k: int, s: int, p: int) -> Fraction:
    den = p ** (k - 1) - eval_poly(build_F(k, s), p)
    if den == 0:
        raise FactorError(f"p^(k-1) = F_({k},{s})(p) at p={p}")
    return 1 + Fraction((-1) ** (k - 1), den)


def g_prime_factor(k: int, t: int, p: int) -> Fraction:
    den = eval_poly(build_G(k, t), p)
    if den == 0:
        raise FactorError(f"G_({k},{t})({p}) = 0")
    return 1 + Fraction((-1) ** (k - t + 1) * binomial(k - 1, t - 1), den)


def local_f(k: int, s: int, n: int) -> Fraction:
    """prod_{p | n} (1 + (-1)^(k-1) / (p^(k-1) - F_{k,s}(p)))."""
    _check_ks(k, s)
    out = Fraction(1)
    for p in numtheory.prime_divisors(n):
        out *= f_prime_factor(k, s, p)
    return out


def local_g(k: int, t: int, n: int) -> Fraction:
    """prod_{p | n} (1 + (-1)^(k-t+1) C(k-1,t-1) / G_{k,t}(p))."""
    _check_kt(k, t)
    out = Fraction(1)
    for p in numtheory.prime_divisors(n):
        out *= g_prime_factor(k, t, p)
    return out


def _frac(x: Fraction) -> mpmath.mpf:
    return mpmath.mpf(x.numerator) / x.denominator


def main_term_A(n: int, k: int, s: int, C: EulerProductResult) -> mpmath.mpf:
    with _mp():
        return C.value * _frac(local_f(k, s, n)) * mpmath.mpf(n) ** (k - 1) / math.factorial(k - 1)


def main_term_B(n: int, k: int, t: int, D: EulerProductResult) -> mpmath.mpf:
    with _mp():
        return D.value * _frac(local_g(k, t, n)) * mpmath.mpf(n) ** (k - 1) / math.factorial(k - 1)


def main_term_R(n: int, k: int) -> mpmath.mpf:
    """J_{k-1}(n) / (k-1)!, the leading term of R_k(n)."""
    with _mp():
        return mpmath.mpf(numtheory.jordan_totient(k - 1, n)) / math.factorial(k - 1)


# -- truncated series against their products ------------------------------------------


def _reciprocal_sum(constraint: CoprimalityConstraint, delta: int, j_bound: int, backend: str | None) -> float:
    if not numtheory.is_squarefree(delta):
        raise ValueError(f"delta={delta} must be squarefree")
    max_exp = multifunc.max_exponent(j_bound)
    table = multifunc.local_table(constraint, max_exp)
    spf = numtheory.smallest_prime_factors(max(j_bound, 2))
    kern = get_backend(backend)
    return float(kern.reciprocal_sum(constraint.k, j_bound, delta, table, max_exp + 1, spf))


def T_delta_check(
    k: int, s: int, delta: int, j_bound: int, prime_bound: int | None = None, *, backend: str | None = None
) -> tuple[float, float]:
    """(truncated lambda series, product over p not dividing delta).

    The series runs over j in [1, j_bound]^k with gcd(j) = 1 and
    gcd(j_1...j_k, delta) = 1. The product is truncated at ``prime_bound``
    (default: j_bound).
    """
    _check_ks(k, s)
    total = _reciprocal_sum(CoprimalityConstraint.split(k, s), delta, j_bound, backend)
    bound = j_bound if prime_bound is None else prime_bound
    product = _skip_product(C_deficit(k, s), k - 1, bound, delta)
    return total, product


def V_delta_check(
    k: int, t: int, delta: int, j_bound: int, prime_bound: int | None = None, *, backend: str | None = None
) -> tuple[float, float]:
    """Same as T_delta_check with psi and the G-product."""
    _check_kt(k, t)
    total = _reciprocal_sum(CoprimalityConstraint.twise(k, t), delta, j_bound, backend)
    bound = j_bound if prime_bound is None else prime_bound
    product = _skip_product(D_deficit(k, t), k - 1, bound, delta)
    return total, product


def _skip_product(deficit: IntegerPolynomial, expo: int, bound: int, delta: int) -> float:
    if bound < 2:
        return 1.0
    res = euler_product(deficit, expo, bound, skip=numtheory.prime_divisors(delta))
    return float(res.value)


# -- empirical residuals ---------------------------------------------------------------


def main_term_for(constraint: CoprimalityConstraint, n: int, constant: EulerProductResult | None) -> mpmath.mpf:
    k = constraint.k
    if constraint.kind == "all":
        return main_term_R(n, k)
    if constraint.kind == "split":
        return main_term_A(n, k, constraint.param, constant)
    return main_term_B(n, k, constraint.param, constant)


def constant_for(constraint: CoprimalityConstraint, prime_bound: int, **kw) -> EulerProductResult | None:
    if constraint.kind == "split":
        return constant_C(constraint.k, constraint.param, prime_bound, **kw)
    if constraint.kind == "twise":
        return constant_D(constraint.k, constraint.param, prime_bound, **kw)
    return None


def residual_scan(
    constraint: CoprimalityConstraint,
    n_list: Sequence[int],
    *,
    prime_bound: int = DEFAULT_PRIME_BOUND,
    work_budget: int | None = counting.DEFAULT_WORK_BUDGET,
    threads: int = 1,
    backend: str | None = None,
    constant: EulerProductResult | None = None,
) -> ScanResult:
    """Pair exact brute-force counts with main-term predictions, in n order.

    Stops before the first n whose enumeration exceeds ``work_budget`` and
    flags the result as partial.
    """
    k = constraint.k
    ns = list(n_list)
    for n in ns:
        if n < k:
            raise ValueError(f"scan needs n >= k, got n={n}, k={k}")
    runnable = []
    stopped = None
    for n in ns:
        if work_budget is not None and counting.brute_work(n, k) > work_budget:
            stopped = n
            break
        runnable.append(n)
    if constant is None:
        constant = constant_for(constraint, prime_bound, backend=backend)

    def exact(n: int) -> int:
        return counting.brute_count(n, constraint, backend=backend, work_budget=None)

    if threads > 1 and len(runnable) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(exact, runnable))
    else:
        counts = [exact(n) for n in runnable]

    rows = []
    with _mp():
        for n, c in zip(runnable, counts):
            main = main_term_for(constraint, n, constant)
            resid = mpmath.mpf(c) - main
            rows.append(
                ResidualRow(
                    n=n,
                    family=constraint.family,
                    k=k,
                    param=constraint.param,
                    exact_count=c,
                    main_term=main,
                    residual=resid,
                    normalized_residual=resid / mpmath.mpf(n) ** (k - 2),
                )
            )
    return ScanResult(rows=rows, partial=stopped is not None, stopped_at=stopped)


def growth_exponent(rows: Sequence[ResidualRow]) -> float:
    """Least-squares slope of log|normalized residual| against log log n."""
    xs = [math.log(math.log(r.n)) for r in rows]
    ys = [math.log(abs(float(r.normalized_residual))) for r in rows]
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


# -- bounds on the local factors ----------------------------------------------------------


def local_factor_table(k: int, param: int, n_max: int, which: str) -> list[Fraction]:
    """f_{k,s}(n) (which='f') or g_{k,t}(n) (which='g') for 0 <= n <= n_max; entry 0 unused.

    Built from the smallest prime factor: h(n) = h(n / p^e) * factor(p).
    """
    per_prime = f_prime_factor if which == "f" else g_prime_factor
    spf = numtheory.smallest_prime_factors(n_max)
    vals: list[Fraction] = [Fraction(0), Fraction(1)] + [Fraction(0)] * max(0, n_max - 1)
    cache: dict[int, Fraction] = {}
    for n in range(2, n_max + 1):
        p = int(spf[n])
        m = n
        while m % p == 0:
            m //= p
        fac = cache.get(p)
        if fac is None:
            fac = cache[p] = per_prime(k, param, p)
        vals[n] = vals[m] * fac
    return vals[: n_max + 1]

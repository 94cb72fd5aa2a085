"""Exact counts of k-compositions of n under the three coprimality constraints.

Families:
    R_k(n)      gcd(x_1, ..., x_k) = 1                       (kind "all")
    A_{k,s}(n)  gcd(x_1...x_s, x_{s+1}...x_k) = 1            (kind "split")
    B_{k,t}(n)  every t of the parts have gcd 1              (kind "twise")

Each family has a brute-force path (enumerate compositions) and an identity
path (divisor sums over multiplicative weights times restricted partition
counts). The two are meant to be run against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

from kcomp import multifunc, numtheory
from kcomp._kernels import KIND_CODES, get_backend
from kcomp.multifunc import CoprimalityConstraint
from kcomp.numtheory import binomial
from kcomp.partitions import count_positive

DEFAULT_WORK_BUDGET = 10**8
INT64_MAX = 2**63 - 1


class BudgetExceeded(RuntimeError):
    def __init__(self, work: int, budget: int, what: str) -> None:
        super().__init__(f"{what}: estimated work {work} exceeds budget {budget}")
        self.work = work
        self.budget = budget


@dataclass(frozen=True)
class CountQuery:
    n: int
    constraint: CoprimalityConstraint
    method: Literal["brute", "identity"] = "identity"

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.method not in ("brute", "identity"):
            raise ValueError(f"unknown method {self.method!r}")

    @property
    def k(self) -> int:
        return self.constraint.k


def total_compositions(n: int, k: int) -> int:
    return binomial(n - 1, k - 1)


def brute_work(n: int, k: int) -> int:
    return total_compositions(n, k)


def brute_count(
    n: int,
    constraint: CoprimalityConstraint,
    *,
    backend: str | None = None,
    work_budget: int | None = DEFAULT_WORK_BUDGET,
) -> int:
    """Count by enumerating every composition (last part forced)."""
    k = constraint.k
    if n < k:
        return 0
    work = brute_work(n, k)
    if work_budget is not None and work > work_budget:
        raise BudgetExceeded(work, work_budget, f"brute count n={n}, k={k}")
    # the kernel counts in int64; C(n-1, k-1) bounds the result
    if work > INT64_MAX:
        raise OverflowError(f"C({n - 1},{k - 1}) exceeds int64")
    kern = get_backend(backend)
    spf = numtheory.smallest_prime_factors(n)
    return int(kern.brute_count(n, k, KIND_CODES[constraint.kind], constraint.param, spf))


def mobius_R(n: int, k: int) -> int:
    """R_k(n) = sum_{d | n} C(d-1, k-1) mu(n/d)."""
    if n < 1 or k < 2:
        raise ValueError("mobius_R needs n >= 1, k >= 2")
    return sum(binomial(d - 1, k - 1) * numtheory.mobius(n // d) for d in numtheory.divisors(n))


def a_coefficients(k: int) -> list[int]:
    """[a_{k,1}, ..., a_{k,k-1}] with a_{k,t} = sum_{j=t}^{k-1} (-1)^(j-t) s(k-1,j) C(j,t)."""
    if k < 2:
        raise ValueError("a_coefficients needs k >= 2")
    out = []
    for t in range(1, k):
        out.append(
            sum((-1) ** (j - t) * numtheory.stirling_first_signed(k - 1, j) * binomial(j, t) for j in range(t, k))
        )
    return out


def jordan_R(n: int, k: int) -> int:
    """R_k(n) as (1/(k-1)!) sum_t a_{k,t} J_t(n); the division must be exact."""
    if k < 2 or n < k:
        raise ValueError(f"jordan_R needs n >= k >= 2, got n={n}, k={k}")
    total = sum(a * numtheory.jordan_totient(t, n) for t, a in enumerate(a_coefficients(k), start=1))
    q, r = divmod(total, math.factorial(k - 1))
    if r:
        raise ArithmeticError(f"jordan_R({n},{k}): {total} not divisible by {k - 1}!")
    return q


def _squarefree_flags(limit: int) -> list[bool]:
    flags = [True] * (limit + 1)
    flags[0] = False
    for p in numtheory.primes_up_to(math.isqrt(limit)):
        for m in range(p * p, limit + 1, p * p):
            flags[m] = False
    return flags


def identity_work(n: int, k: int) -> int:
    """Tuples visited by the identity sum: those with j_1 + ... + j_k <= n/delta."""
    return sum(binomial(n // d, k) for d in numtheory.divisors(n) if numtheory.is_squarefree(d))


def _identity_sum(
    n: int,
    k: int,
    weight: Callable[[tuple[int, ...]], int],
    diagonal: Callable[[int], int],
    work_budget: int | None,
) -> int:
    work = identity_work(n, k)
    if work_budget is not None and work > work_budget:
        raise BudgetExceeded(work, work_budget, f"identity sum n={n}, k={k}")
    sqfree = _squarefree_flags(n)
    total = 0
    for delta in numtheory.divisors(n):
        dweight = diagonal(delta)
        if dweight == 0:
            continue
        m = n // delta
        inner = 0
        js: list[int] = []

        # N(m; j) vanishes once j_1 + ... + j_k > m, so only those tuples are visited;
        # non-squarefree j_i make the weight 0 and are skipped early
        def rec(rem: int, g: int) -> None:
            nonlocal inner
            slots = k - len(js)
            if slots == 0:
                if g != 1:
                    return
                w = weight(tuple(js))
                if w:
                    inner += w * count_positive(m, js)
                return
            for v in range(1, rem - (slots - 1) + 1):
                if not sqfree[v] or math.gcd(v, delta) != 1:
                    continue
                js.append(v)
                rec(rem - v, math.gcd(g, v))
                js.pop()

        rec(m, 0)
        total += dweight * inner
    return total


def identity_A(n: int, k: int, s: int, *, work_budget: int | None = DEFAULT_WORK_BUDGET) -> int:
    """A_{k,s}(n) through lambda-weighted restricted partition counts."""
    if k < 3 or not 1 <= s <= k - 1 or n < k:
        raise ValueError(f"identity_A needs n >= k >= 3 and 1 <= s <= k-1, got n={n}, k={k}, s={s}")
    return _identity_sum(
        n,
        k,
        lambda js: multifunc.lambda_(k, s, js),
        lambda d: multifunc.diagonal_lambda(k, d),
        work_budget,
    )


def identity_B(n: int, k: int, t: int, *, work_budget: int | None = DEFAULT_WORK_BUDGET) -> int:
    """B_{k,t}(n) through psi-weighted restricted partition counts."""
    if k < 3 or not 2 <= t <= k or n < k:
        raise ValueError(f"identity_B needs n >= k >= 3 and 2 <= t <= k, got n={n}, k={k}, t={t}")
    return _identity_sum(
        n,
        k,
        lambda js: multifunc.psi(k, t, js),
        lambda d: multifunc.diagonal_psi(k, t, d),
        work_budget,
    )


def identity_count(n: int, constraint: CoprimalityConstraint, *, work_budget: int | None = DEFAULT_WORK_BUDGET) -> int:
    k = constraint.k
    if n < k:
        return 0
    if constraint.kind == "all":
        return mobius_R(n, k)
    if constraint.kind == "split":
        return identity_A(n, k, constraint.param, work_budget=work_budget)
    return identity_B(n, k, constraint.param, work_budget=work_budget)


def count(query: CountQuery, *, work_budget: int | None = DEFAULT_WORK_BUDGET, backend: str | None = None) -> int:
    if query.method == "brute":
        return brute_count(query.n, query.constraint, backend=backend, work_budget=work_budget)
    return identity_count(query.n, query.constraint, work_budget=work_budget)

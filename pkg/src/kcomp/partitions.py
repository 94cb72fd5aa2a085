"""Restricted partition counts (denumerants).

``count_nonneg(n, a)`` is the number of nonnegative solutions of
a_1 x_1 + ... + a_k x_k = n; ``count_positive`` counts positive solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence


@dataclass(frozen=True)
class WeightVector:
    a: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.a) < 1:
            raise ValueError("weight vector needs k >= 1 entries")
        if any(int(x) < 1 for x in self.a):
            raise ValueError(f"weights must be positive, got {self.a}")
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))

    @property
    def k(self) -> int:
        return len(self.a)

    @property
    def gcd(self) -> int:
        return reduce(math.gcd, self.a)

    @property
    def lcm(self) -> int:
        return reduce(math.lcm, self.a)


@dataclass(frozen=True)
class QuasiPolyReport:
    period: int
    degree: int
    max_abs_kth_difference: int
    differences_checked: int


def _weights(a: WeightVector | Sequence[int]) -> WeightVector:
    return a if isinstance(a, WeightVector) else WeightVector(tuple(a))


def count_nonneg_table(n_max: int, a: WeightVector | Sequence[int]) -> list[int]:
    """P(m; a) for every 0 <= m <= n_max, exact.

    One 1-D table, updated weight by weight in unbounded-knapsack order.
    """
    w = _weights(a)
    table = [0] * (n_max + 1)
    table[0] = 1
    for ai in w.a:
        for m in range(ai, n_max + 1):
            table[m] += table[m - ai]
    return table


@lru_cache(maxsize=1 << 15)
def _nonneg_sorted(n: int, a: tuple[int, ...]) -> int:
    return count_nonneg_table(n, a)[n]


def count_nonneg(n: int, a: WeightVector | Sequence[int]) -> int:
    if n < 0:
        return 0
    w = _weights(a)
    # P is symmetric in the weights; sorting improves cache hits
    return _nonneg_sorted(int(n), tuple(sorted(w.a)))


def count_positive(n: int, a: WeightVector | Sequence[int]) -> int:
    """N(n; a) = P(n - sum(a); a), 0 when n < sum(a)."""
    w = _weights(a)
    return count_nonneg(n - sum(w.a), w)


def _require_coprime(w: WeightVector) -> None:
    if w.gcd != 1:
        raise ValueError(f"weights must have gcd 1, got gcd {w.gcd} for {w.a}")


def main_term(n: int, a: WeightVector | Sequence[int]) -> Fraction:
    """n^(k-1) / ((k-1)! a_1...a_k), the leading asymptotic of N(n; a)."""
    w = _weights(a)
    _require_coprime(w)
    return Fraction(n ** (w.k - 1), math.factorial(w.k - 1) * math.prod(w.a))


def leading_coeffs(a: WeightVector | Sequence[int]) -> tuple[Fraction, Fraction]:
    """(c_{k-1}, c_{k-2}) of the polynomial part of P(n; a)."""
    w = _weights(a)
    _require_coprime(w)
    if w.k < 2:
        raise ValueError("leading_coeffs needs k >= 2")
    prod = math.prod(w.a)
    top = Fraction(1, math.factorial(w.k - 1) * prod)
    nxt = Fraction(sum(w.a), 2 * math.factorial(w.k - 2) * prod)
    return top, nxt


def kth_difference(values: Sequence[int], k: int, step: int) -> list[int]:
    """Forward difference of order k with the given step."""
    cur = list(values)
    for _ in range(k):
        cur = [cur[i + step] - cur[i] for i in range(len(cur) - step)]
    return cur


def quasipoly_check(a: WeightVector | Sequence[int], n_max: int) -> QuasiPolyReport:
    """Check that n -> P(n; a) is a quasi-polynomial of degree k-1, period lcm(a).

    The k-th finite difference with step L = lcm(a) vanishes identically iff
    every residue class mod L carries a polynomial of degree < k.
    """
    w = _weights(a)
    _require_coprime(w)
    period = w.lcm
    if n_max < w.k * period:
        raise ValueError(
            f"n_max={n_max} too small for one order-{w.k} difference at step {period}"
        )
    diffs = kth_difference(count_nonneg_table(n_max, w), w.k, period)
    return QuasiPolyReport(
        period=period,
        degree=w.k - 1,
        max_abs_kth_difference=max(abs(d) for d in diffs),
        differences_checked=len(diffs),
    )


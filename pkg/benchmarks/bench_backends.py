#!/usr/bin/env python3
"""Time the numba kernels against the pure-numpy fallback.

Each kernel runs once untimed (JIT warm-up), then ``--repeat`` times; the
best wall time is reported. Results from both backends are compared so a
speedup never hides a wrong answer.

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --quick --repeat 5
"""

from __future__ import annotations

import argparse
import math
import random
import time
from dataclasses import dataclass

import numpy as np

from kcomp import multifunc, numtheory
from kcomp._kernels import KIND_CODES, get_backend
from kcomp.multifunc import CoprimalityConstraint as CC


@dataclass
class Case:
    name: str
    run: object  # callable(kernel_module) -> result


@dataclass
class Timing:
    name: str
    numba_s: float
    numpy_s: float
    agree: bool

    @property
    def speedup(self) -> float:
        return self.numpy_s / self.numba_s if self.numba_s > 0 else math.inf


def _csr(limit: int):
    lists = [numtheory.divisors(v) if v else [] for v in range(limit + 1)]
    ptr = np.zeros(limit + 2, dtype=np.int64)
    ptr[1:] = np.cumsum([len(x) for x in lists])
    return ptr, np.asarray([d for x in lists for d in x], dtype=np.int64)


def build_cases(quick: bool) -> list[Case]:
    n_brute = 150 if quick else 300
    spf = numtheory.smallest_prime_factors(max(n_brute, 64))
    cases = []
    for c in (CC.all_coprime(4), CC.split(4, 2), CC.twise(4, 3)):
        code = KIND_CODES[c.kind]
        cases.append(
            Case(
                f"brute_count n={n_brute} {c.kind}({c.k},{c.param})",
                lambda kern, c=c, code=code: kern.brute_count(n_brute, c.k, code, c.param, spf),
            )
        )

    limit = 24 if quick else 36
    rng = random.Random(0)
    tuples = np.array([[rng.randint(1, limit) for _ in range(3)] for _ in range(20000)], dtype=np.int64)
    c = CC.split(3, 1)
    max_exp = multifunc.max_exponent(limit)
    table = multifunc.local_table(c, max_exp)
    spf_l = numtheory.smallest_prime_factors(limit)
    ptr, val = _csr(limit)
    cases.append(
        Case(
            f"divisor_sums 20000 triples <= {limit}",
            lambda kern: kern.divisor_sums(tuples, 3, table, max_exp + 1, spf_l, ptr, val),
        )
    )

    j_bound = 30 if quick else 60
    c = CC.twise(3, 2)
    max_exp = multifunc.max_exponent(j_bound)
    table_r = multifunc.local_table(c, max_exp)
    spf_j = numtheory.smallest_prime_factors(j_bound)
    cases.append(
        Case(
            f"reciprocal_sum k=3 j<={j_bound}",
            lambda kern: kern.reciprocal_sum(3, j_bound, 6, table_r, max_exp + 1, spf_j),
        )
    )

    bound = 10**6 if quick else 10**7
    primes = np.asarray(numtheory.primes_up_to(bound), dtype=np.float64)
    deficit = np.array([1.0, 0.0, -3.0, 2.0], dtype=np.float64)
    cases.append(Case(f"log_factor_sum primes <= {bound:.0e}", lambda kern: kern.log_factor_sum(primes, deficit, 4)))
    return cases


def _best(fn, kern, repeat: int):
    result = fn(kern)  # warm-up, also triggers compilation
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(kern)
        best = min(best, time.perf_counter() - t0)
    return best, result


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return bool(np.array_equal(a, b))
    if isinstance(a, float):
        return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-15)
    return a == b


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3, help="timed runs per kernel (best is kept)")
    ap.add_argument("--quick", action="store_true", help="smaller problem sizes")
    args = ap.parse_args(argv)

    fast, slow = get_backend("numba"), get_backend("numpy")
    if fast is slow:
        print("numba is not importable; nothing to compare")
        return 1

    rows = []
    for case in build_cases(args.quick):
        t_fast, r_fast = _best(case.run, fast, args.repeat)
        t_slow, r_slow = _best(case.run, slow, args.repeat)
        rows.append(Timing(case.name, t_fast, t_slow, _same(r_fast, r_slow)))

    width = max(len(r.name) for r in rows)
    print(f"{'kernel':<{width}}  {'numba [s]':>10}  {'numpy [s]':>10}  {'speedup':>8}  agree")
    for r in rows:
        print(f"{r.name:<{width}}  {r.numba_s:>10.4f}  {r.numpy_s:>10.4f}  {r.speedup:>7.2f}x  {r.agree}")
    return 0 if all(r.agree for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())

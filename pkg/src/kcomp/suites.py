"""Self-check suites shared by ``kcomp verify`` and the test-suite.

Each check returns a CheckResult with the number of cases it ran and how
many failed. Checks never raise on a wrong value; an exception escaping a
library call counts as one failure and is kept in ``detail``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable

import numpy as np

from kcomp import asymptotics, counting, multifunc, numtheory, partitions, polynomials
from kcomp._kernels import KIND_CODES, get_backend
from kcomp.multifunc import CoprimalityConstraint

SUITES = ("identities", "convolution", "partitions", "asymptotics")

QUASI_WEIGHTS = ((1, 2, 3), (2, 3, 5), (1, 1, 2, 3))


@dataclass
class CheckResult:
    check_name: str
    cases_run: int = 0
    failures: int = 0
    detail: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.cases_run > 0

    def record(self, good: bool, what: str = "") -> None:
        self.cases_run += 1
        if not good:
            self.failures += 1
            if len(self.detail) < 5 and what:
                self.detail.append(what)


@dataclass
class SuiteOptions:
    seed: int = 0
    threads: int = 1
    backend: str | None = None
    work_budget: int | None = counting.DEFAULT_WORK_BUDGET


def _guarded(name: str, body: Callable[[CheckResult], None]) -> CheckResult:
    res = CheckResult(name)
    try:
        body(res)
    except (ArithmeticError, ValueError, AssertionError, RuntimeError) as exc:
        res.record(False, f"{type(exc).__name__}: {exc}")
    return res


# -- identities -----------------------------------------------------------------


def check_R_oracles(opts: SuiteOptions, k_range=range(2, 6), n_max: int = 60) -> CheckResult:
    def body(res: CheckResult) -> None:
        for k in k_range:
            c = CoprimalityConstraint.all_coprime(k)
            for n in range(k, n_max + 1):
                a = counting.mobius_R(n, k)
                b = counting.jordan_R(n, k)
                d = counting.brute_count(n, c, backend=opts.backend, work_budget=opts.work_budget)
                res.record(a == b == d, f"R_{k}({n}): mobius={a} jordan={b} brute={d}")

    return _guarded("R_oracles", body)


def _identity_vs_brute(name: str, kind: str, opts: SuiteOptions, ks, n_max: int) -> CheckResult:
    def body(res: CheckResult) -> None:
        for k in ks:
            params = range(1, k) if kind == "split" else range(2, k + 1)
            for param in params:
                c = CoprimalityConstraint(kind, k, param)
                for n in range(k, n_max + 1):
                    ident = counting.identity_count(n, c, work_budget=opts.work_budget)
                    brute = counting.brute_count(n, c, backend=opts.backend, work_budget=opts.work_budget)
                    res.record(ident == brute, f"{c.family}({k},{param}) n={n}: identity={ident} brute={brute}")

    return _guarded(name, body)


def check_A_identity(opts: SuiteOptions, ks=(3, 4), n_max: int = 30) -> CheckResult:
    return _identity_vs_brute("A_identity", "split", opts, ks, n_max)


def check_B_identity(opts: SuiteOptions, ks=(3, 4), n_max: int = 30) -> CheckResult:
    return _identity_vs_brute("B_identity", "twise", opts, ks, n_max)


def check_lambert(opts: SuiteOptions, n_max: int = 200, k_max: int = 5) -> CheckResult:
    def body(res: CheckResult) -> None:
        for k in range(2, k_max + 1):
            for n in range(1, n_max + 1):
                lhs = sum(counting.mobius_R(n // d, k) for d in numtheory.divisors(n))
                res.record(lhs == numtheory.binomial(n - 1, k - 1), f"k={k} n={n}: {lhs}")

    return _guarded("lambert_partition", body)


# -- convolution ----------------------------------------------------------------------


def _divisor_csr(limit: int) -> tuple[np.ndarray, np.ndarray]:
    lists = [numtheory.divisors(v) if v else [] for v in range(limit + 1)]
    ptr = np.zeros(limit + 2, dtype=np.int64)
    ptr[1:] = np.cumsum([len(x) for x in lists])
    val = np.asarray([d for x in lists for d in x], dtype=np.int64)
    return ptr, val


def _convolution_batch(res: CheckResult, c: CoprimalityConstraint, tuples: np.ndarray, opts: SuiteOptions) -> None:
    kern = get_backend(opts.backend)
    limit = int(tuples.max())
    max_exp = multifunc.max_exponent(limit)
    table = multifunc.local_table(c, max_exp)
    spf = numtheory.smallest_prime_factors(max(limit, 2))
    ptr, val = _divisor_csr(limit)
    sums = kern.divisor_sums(tuples, c.k, table, max_exp + 1, spf, ptr, val)
    ind = kern.indicators(tuples, c.k, KIND_CODES[c.kind], c.param)
    bad = np.flatnonzero(sums != ind)
    res.cases_run += len(tuples)
    res.failures += int(bad.size)
    for i in bad[:3]:
        res.detail.append(f"{c.family}({c.k},{c.param}) {tuple(tuples[i])}: sum={sums[i]} indicator={ind[i]}")


def check_convolution_k3(opts: SuiteOptions, bound: int = 36) -> CheckResult:
    def body(res: CheckResult) -> None:
        tuples = np.array(list(product(range(1, bound + 1), repeat=3)), dtype=np.int64)
        for c in (
            CoprimalityConstraint.split(3, 1),
            CoprimalityConstraint.split(3, 2),
            CoprimalityConstraint.twise(3, 2),
            CoprimalityConstraint.twise(3, 3),
        ):
            _convolution_batch(res, c, tuples, opts)

    return _guarded("convolution_k3_grid", body)


def check_convolution_k4(opts: SuiteOptions, count: int = 1000, bound: int = 24) -> CheckResult:
    def body(res: CheckResult) -> None:
        rng = random.Random(opts.seed)
        tuples = np.array([[rng.randint(1, bound) for _ in range(4)] for _ in range(count)], dtype=np.int64)
        for s in range(1, 4):
            _convolution_batch(res, CoprimalityConstraint.split(4, s), tuples, opts)
        for t in range(2, 5):
            _convolution_batch(res, CoprimalityConstraint.twise(4, t), tuples, opts)

    return _guarded("convolution_k4_random", body)


def check_convolution_reference(opts: SuiteOptions, count: int = 200, bound: int = 12) -> CheckResult:
    """Pure-Python convolution on a small seeded sample, independent of the kernels."""

    def body(res: CheckResult) -> None:
        rng = random.Random(opts.seed + 1)
        for _ in range(count):
            k = rng.choice((3, 4))
            ns = [rng.randint(1, bound) for _ in range(k)]
            if rng.random() < 0.5:
                c = CoprimalityConstraint.split(k, rng.randint(1, k - 1))
            else:
                c = CoprimalityConstraint.twise(k, rng.randint(2, k))
            res.record(multifunc.convolution_check(c, ns), f"{c.family}({k},{c.param}) {ns}")

    return _guarded("convolution_reference", body)


# -- partitions ----------------------------------------------------------------------------


def check_quasipolynomial(opts: SuiteOptions, n_max: int = 300) -> CheckResult:
    def body(res: CheckResult) -> None:
        for a in QUASI_WEIGHTS:
            rep = partitions.quasipoly_check(a, n_max)
            res.record(rep.max_abs_kth_difference == 0, f"{a}: max |diff| = {rep.max_abs_kth_difference}")

    return _guarded("quasi_polynomial", body)


def _naive_nonneg(n: int, a: tuple[int, ...]) -> int:
    if len(a) == 1:
        return int(n % a[0] == 0)
    return sum(_naive_nonneg(n - x * a[0], a[1:]) for x in range(n // a[0] + 1))


def check_partition_counts(opts: SuiteOptions, n_max: int = 40) -> CheckResult:
    def body(res: CheckResult) -> None:
        for a in QUASI_WEIGHTS + ((1, 1, 1), (3, 4)):
            for n in range(n_max + 1):
                got = partitions.count_nonneg(n, a)
                res.record(got == _naive_nonneg(n, a), f"P({n};{a}) = {got}")
                pos = partitions.count_positive(n, a)
                res.record(pos == _naive_nonneg(n - sum(a), a) if n >= sum(a) else pos == 0, f"N({n};{a}) = {pos}")

    return _guarded("partition_counts", body)


# -- asymptotics ----------------------------------------------------------------------------


def check_polynomials(opts: SuiteOptions, k_max: int = 12) -> CheckResult:
    def body(res: CheckResult) -> None:
        for k in range(3, k_max + 1):
            for s in range(1, k):
                F = polynomials.build_F(k, s)
                res.record(F.degree == k - 3, f"deg F_({k},{s}) = {F.degree}")
                res.record(F == polynomials.build_F(k, k - s), f"F_({k},{s}) != F_({k},{k - s})")
            for t in range(2, k + 1):
                g1 = polynomials._G_binomial_form(k, t)
                g2 = polynomials._G_monomial_form(k, t)
                res.record(g1 == g2, f"G_({k},{t}) forms differ")
                res.record(g1.degree == k - 1, f"deg G_({k},{t}) = {g1.degree}")
            res.record(polynomials.build_G(k, k) == polynomials.IntegerPolynomial.monomial(k - 1), f"G_({k},{k})")

    return _guarded("polynomial_structure", body)


def check_euler_factors(opts: SuiteOptions, p_max: int = 1000, k_max: int = 8) -> CheckResult:
    def body(res: CheckResult) -> None:
        primes = numtheory.primes_up_to(p_max)
        for k in range(3, k_max + 1):
            for s in range(1, k):
                for p in primes:
                    a = polynomials.H_local_factor(k, s, p)
                    res.record(a == polynomials.H_local_factor_direct(k, s, p), f"H_({k},{s}) p={p}")
            for t in range(2, k + 1):
                for p in primes:
                    a = polynomials.L_local_factor(k, t, p)
                    res.record(a == polynomials.L_local_factor_direct(k, t, p), f"L_({k},{t}) p={p}")

    return _guarded("euler_factor_identities", body)


def check_constant_stability(
    opts: SuiteOptions, low: int = 10**5, high: int = 10**6, tol: float = 1e-6
) -> CheckResult:
    def body(res: CheckResult) -> None:
        kw = {"threads": opts.threads, "backend": opts.backend}
        for k in (3, 4, 5):
            for s in range(1, k):
                a = asymptotics.constant_C(k, s, low, **kw).value
                b = asymptotics.constant_C(k, s, high, **kw).value
                res.record(abs(a - b) < tol, f"C_({k},{s}): {a} vs {b}")
            for t in range(2, k + 1):
                a = asymptotics.constant_D(k, t, low, **kw).value
                b = asymptotics.constant_D(k, t, high, **kw).value
                res.record(abs(a - b) < tol, f"D_({k},{t}): {a} vs {b}")
            res.record(asymptotics.constant_D(k, k, high, **kw).value == 1, f"D_({k},{k}) != 1")

    return _guarded("constant_stability", body)


def check_local_bounds(opts: SuiteOptions, n_max: int = 10**5) -> CheckResult:
    def body(res: CheckResult) -> None:
        for k in (3, 4, 5):
            f = asymptotics.local_factor_table(k, 1, n_max, "f")
            lo, hi = Fraction(2, 3), Fraction(2)
            bad = [n for n in range(1, n_max + 1) if not lo < f[n] < hi]
            res.cases_run += n_max
            res.failures += len(bad)
            if bad:
                res.detail.append(f"f_({k},1) out of bounds at n={bad[0]}")
            g = asymptotics.local_factor_table(k, 2, n_max, "g")
            lo, hi = Fraction(1, 2 * k), Fraction(2 * k)
            bad = [n for n in range(1, n_max + 1) if not lo < g[n] < hi]
            res.cases_run += n_max
            res.failures += len(bad)
            if bad:
                res.detail.append(f"g_({k},2) out of bounds at n={bad[0]}")

    return _guarded("local_factor_bounds", body)


MAIN_TERM_POINTS = (1000, 2000, 5000, 10000)
MAIN_TERM_TOL = {1000: 0.10, 10000: 0.03}
GROWTH_LIMIT = 2.5


def check_main_terms(opts: SuiteOptions) -> CheckResult:
    def body(res: CheckResult) -> None:
        for c in (CoprimalityConstraint.split(3, 1), CoprimalityConstraint.twise(3, 2)):
            scan = asymptotics.residual_scan(
                c, MAIN_TERM_POINTS, work_budget=opts.work_budget, threads=opts.threads, backend=opts.backend
            )
            res.record(not scan.partial, f"{c.family} scan stopped at n={scan.stopped_at}")
            if scan.partial:
                continue
            for row in scan.rows:
                if row.n in MAIN_TERM_TOL:
                    err = abs(row.exact_count / row.main_term - 1)
                    res.record(err <= MAIN_TERM_TOL[row.n], f"{c.family} n={row.n}: rel. error {float(err):.4g}")
            slope = asymptotics.growth_exponent(scan.rows)
            res.record(slope <= GROWTH_LIMIT, f"{c.family} growth exponent {slope:.3f}")

    return _guarded("main_term_accuracy", body)


def check_collapse(opts: SuiteOptions, n_max: int = 300) -> CheckResult:
    def body(res: CheckResult) -> None:
        for k in (3, 4, 5):
            D = asymptotics.constant_D(k, k, 1000)
            for n in range(k, n_max + 1):
                g = asymptotics.local_g(k, k, n)
                res.record(g == Fraction(numtheory.jordan_totient(k - 1, n), n ** (k - 1)), f"g_({k},{k})({n})")
                mb = asymptotics.main_term_B(n, k, k, D)
                mr = asymptotics.main_term_R(n, k)
                res.record(abs(mb / mr - 1) < 1e-9, f"main_B({n},{k},{k}) vs J/(k-1)!")

    return _guarded("t_equals_k_collapse", body)


# -- registry ---------------------------------------------------------------------------------

SUITE_CHECKS: dict[str, tuple[Callable[[SuiteOptions], CheckResult], ...]] = {
    "identities": (check_R_oracles, check_A_identity, check_B_identity, check_lambert),
    "convolution": (check_convolution_k3, check_convolution_k4, check_convolution_reference),
    "partitions": (check_quasipolynomial, check_partition_counts),
    "asymptotics": (
        check_polynomials,
        check_euler_factors,
        check_constant_stability,
        check_local_bounds,
        check_collapse,
        check_main_terms,
    ),
}


def run_suite(name: str, opts: SuiteOptions | None = None) -> list[CheckResult]:
    opts = opts or SuiteOptions()
    names = SUITES if name == "all" else (name,)
    out = []
    for suite in names:
        if suite not in SUITE_CHECKS:
            raise ValueError(f"unknown suite {suite!r}")
        out.extend(check(opts) for check in SUITE_CHECKS[suite])
    return out


def total_failures(results: list[CheckResult]) -> int:
    return sum(r.failures for r in results) + sum(1 for r in results if r.cases_run == 0)


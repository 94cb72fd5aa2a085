"""Acceptance criteria 1-12, each at its stated tolerance and time limit.

Every criterion prints one ``PASS``/``FAIL`` line (visible without ``-s``).
Run standalone with ``python3 tests/test_acceptance.py`` for the same lines
and a non-zero exit status on any failure.
"""

from __future__ import annotations

import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from kcomp import asymptotics, counting, multifunc, numtheory, partitions, polynomials
from kcomp._kernels import KIND_CODES, get_backend
from kcomp.multifunc import CoprimalityConstraint as CC


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  criterion {self.number:>2}: {self.title} ({self.detail}; {self.seconds:.1f}s)"


def timed(number: int, title: str, limit: float | None, body) -> Outcome:
    start = time.perf_counter()
    ok, detail = body()
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed >= limit:
        ok = False
        detail += f"; exceeded {limit:.0f}s limit"
    return Outcome(number, title, ok, detail, elapsed)


# -- criterion bodies: each returns (passed, detail) ---------------------------------------


def crit1_R_oracles():
    bad = 0
    cases = 0
    for k in range(2, 6):
        c = CC.all_coprime(k)
        for n in range(k, 61):
            cases += 1
            a, b, d = counting.mobius_R(n, k), counting.jordan_R(n, k), counting.brute_count(n, c)
            bad += not (a == b == d)
    return bad == 0, f"{cases} cases, {bad} mismatches"


def _identity_family(kind: str):
    bad = 0
    cases = 0
    for k in (3, 4):
        params = range(1, k) if kind == "split" else range(2, k + 1)
        for p in params:
            c = CC(kind, k, p)
            for n in range(k, 31):
                cases += 1
                ident = counting.identity_A(n, k, p) if kind == "split" else counting.identity_B(n, k, p)
                bad += ident != counting.brute_count(n, c)
    return bad == 0, f"{cases} cases, {bad} mismatches"


def crit2_A_identity():
    return _identity_family("split")


def crit3_B_identity():
    return _identity_family("twise")


def _csr(limit: int):
    lists = [numtheory.divisors(v) if v else [] for v in range(limit + 1)]
    ptr = np.zeros(limit + 2, dtype=np.int64)
    ptr[1:] = np.cumsum([len(x) for x in lists])
    return ptr, np.asarray([d for x in lists for d in x], dtype=np.int64)


def _conv_mismatches(c: CC, tuples: np.ndarray) -> int:
    kern = get_backend()
    limit = int(tuples.max())
    max_exp = multifunc.max_exponent(limit)
    table = multifunc.local_table(c, max_exp)
    spf = numtheory.smallest_prime_factors(limit)
    ptr, val = _csr(limit)
    sums = kern.divisor_sums(tuples, c.k, table, max_exp + 1, spf, ptr, val)
    ind = kern.indicators(tuples, c.k, KIND_CODES[c.kind], c.param)
    return int(np.count_nonzero(sums != ind))


def crit4_convolution():
    grid = np.array(list(product(range(1, 37), repeat=3)), dtype=np.int64)
    rng = random.Random(0)
    rand4 = np.array([[rng.randint(1, 24) for _ in range(4)] for _ in range(1000)], dtype=np.int64)
    bad = 0
    cases = 0
    for c in (CC.split(3, 1), CC.split(3, 2), CC.twise(3, 2), CC.twise(3, 3)):
        bad += _conv_mismatches(c, grid)
        cases += len(grid)
    for c in [CC.split(4, s) for s in (1, 2, 3)] + [CC.twise(4, t) for t in (2, 3, 4)]:
        bad += _conv_mismatches(c, rand4)
        cases += len(rand4)
    return bad == 0, f"{cases} tuple checks, {bad} mismatches"


def crit5_lambert():
    bad = 0
    for k in range(1, 6):
        for n in range(1, 201):
            if k == 1:
                lhs = sum(1 for d in numtheory.divisors(n) if n // d == 1)
            else:
                lhs = sum(counting.mobius_R(n // d, k) for d in numtheory.divisors(n))
            bad += lhs != numtheory.binomial(n - 1, k - 1)
    return bad == 0, f"1000 cases, {bad} mismatches"


def crit6_polynomials():
    bad = 0
    for k in range(3, 13):
        for s in range(1, k):
            F = polynomials.build_F(k, s)
            bad += F.degree != k - 3
            bad += F != polynomials.build_F(k, k - s)
        for t in range(2, k + 1):
            g1, g2 = polynomials._G_binomial_form(k, t), polynomials._G_monomial_form(k, t)
            bad += g1 != g2
            bad += g1.degree != k - 1
        bad += polynomials.build_G(k, k) != polynomials.IntegerPolynomial.monomial(k - 1)
    return bad == 0, f"k in [3,12], {bad} violations"


def crit7_euler_factors():
    bad = 0
    cases = 0
    primes = numtheory.primes_up_to(1000)
    for k in range(3, 9):
        for s in range(1, k):
            for p in primes:
                u = 1 - Fraction(1, p)
                lhs = u**s + u ** (k - s) - u**k
                rhs = 1 - Fraction(p * polynomials.eval_poly(polynomials.build_F(k, s), p) + (-1) ** k, p**k)
                bad += lhs != rhs
                cases += 1
        for t in range(2, k + 1):
            G = polynomials.build_G(k, t)
            for p in primes:
                x = [Fraction(1, p)] * k
                lhs = 1 - sum(
                    (-1) ** (j - t) * numtheory.binomial(j - 1, t - 1) * polynomials.elementary_symmetric(j, x)
                    for j in range(t, k + 1)
                )
                rhs = Fraction(p * polynomials.eval_poly(G, p) + (-1) ** (k - t + 1) * numtheory.binomial(k - 1, t - 1), p**k)
                bad += lhs != rhs
                cases += 1
    return bad == 0, f"{cases} prime-level identities, {bad} failures"


def crit8_constant_stability():
    worst = 0.0
    ones = True
    for k in (3, 4, 5):
        for s in range(1, k):
            diff = abs(asymptotics.constant_C(k, s, 10**5).value - asymptotics.constant_C(k, s, 10**6).value)
            worst = max(worst, float(diff))
        for t in range(2, k + 1):
            diff = abs(asymptotics.constant_D(k, t, 10**5).value - asymptotics.constant_D(k, t, 10**6).value)
            worst = max(worst, float(diff))
        ones &= asymptotics.constant_D(k, k, 10**5).value == 1 and asymptotics.constant_D(k, k, 10**6).value == 1
    return worst < 1e-6 and ones, f"max |diff| = {worst:.2e}, D(k,k) == 1: {ones}"


def crit9_main_terms():
    parts = []
    ok = True
    for c in (CC.split(3, 1), CC.twise(3, 2)):
        scan = asymptotics.residual_scan(c, [1000, 2000, 5000, 10000])
        if scan.partial:
            return False, f"{c.family} scan truncated at n={scan.stopped_at}"
        err = {r.n: float(abs(r.exact_count / r.main_term - 1)) for r in scan.rows}
        slope = asymptotics.growth_exponent(scan.rows)
        ok &= err[1000] <= 0.10 and err[10000] <= 0.03 and slope <= 2.5
        parts.append(f"{c.family}: err(1e3)={err[1000]:.1e} err(1e4)={err[10000]:.1e} slope={slope:.2f}")
    return ok, "; ".join(parts)


def crit10_quasipolynomial():
    worst = 0
    for a in ((1, 2, 3), (2, 3, 5), (1, 1, 2, 3)):
        worst = max(worst, partitions.quasipoly_check(a, 300).max_abs_kth_difference)
    return worst == 0, f"max |k-th difference| = {worst}"


def crit11_local_bounds():
    bad = 0
    for k in (3, 4, 5):
        f = asymptotics.local_factor_table(k, 1, 10**5, "f")
        g = asymptotics.local_factor_table(k, 2, 10**5, "g")
        lo_f, hi_f = Fraction(2, 3), Fraction(2)
        lo_g, hi_g = Fraction(1, 2 * k), Fraction(2 * k)
        bad += sum(1 for x in f[1:] if not lo_f < x < hi_f)
        bad += sum(1 for x in g[1:] if not lo_g < x < hi_g)
    return bad == 0, f"n <= 1e5, k in 3..5, {bad} violations"


def _flip(rule):
    def flipped(k, param, nu):
        v = rule(k, param, nu)
        return -v if any(nu) else v

    return flipped


def crit12_mutation():
    lam, psi = multifunc.lambda_local, multifunc.psi_local
    outcomes = {}
    try:
        multifunc.lambda_local = _flip(lam)
        outcomes["lambda"] = (crit2_A_identity()[0], crit4_convolution()[0])
        multifunc.lambda_local = lam
        multifunc.psi_local = _flip(psi)
        outcomes["psi"] = (crit3_B_identity()[0], crit4_convolution()[0])
        multifunc.lambda_local = _flip(lam)
        outcomes["both"] = (crit2_A_identity()[0], crit3_B_identity()[0], crit4_convolution()[0])
    finally:
        multifunc.lambda_local, multifunc.psi_local = lam, psi
    caught = {name: not any(res) for name, res in outcomes.items()}
    # and the unmutated suites still pass afterwards
    clean = crit2_A_identity()[0] and crit3_B_identity()[0]
    detail = (
        f"lambda flip caught by 2,4: {caught['lambda']}; psi flip caught by 3,4: {caught['psi']}; "
        f"both caught by 2,3,4: {caught['both']}"
    )
    return all(caught.values()) and clean, detail


CRITERIA = [
    (1, "R-family oracle equivalence", 10, crit1_R_oracles),
    (2, "A-family identity = brute force", 120, crit2_A_identity),
    (3, "B-family identity = brute force", 120, crit3_B_identity),
    (4, "convolution identities", 60, crit4_convolution),
    (5, "Lambert partition identity", None, crit5_lambert),
    (6, "polynomial structure", None, crit6_polynomials),
    (7, "Euler-factor identities at (1,...,1)", None, crit7_euler_factors),
    (8, "constant stability 1e5 vs 1e6", 30, crit8_constant_stability),
    (9, "main-term accuracy and residual growth", 120, crit9_main_terms),
    (10, "quasi-polynomial finite differences", None, crit10_quasipolynomial),
    (11, "local-factor bounds", None, crit11_local_bounds),
    (12, "mutation sanity", None, crit12_mutation),
]


@pytest.fixture(scope="module", autouse=True)
def _warm_kernels():
    # compile the numba kernels once so criterion timings measure the work, not the JIT
    counting.brute_count(12, CC.twise(4, 3))
    counting.brute_count(12, CC.split(4, 2))
    counting.brute_count(12, CC.all_coprime(3))
    _conv_mismatches(CC.split(3, 1), np.array([[1, 2, 3]], dtype=np.int64))


@pytest.mark.parametrize("number,title,limit,body", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, title, limit, body, capsys):
    outcome = timed(number, title, limit, body)
    with capsys.disabled():
        print("\n" + outcome.line())
    assert outcome.passed, outcome.line()


def main() -> int:
    failed = 0
    for number, title, limit, body in CRITERIA:
        outcome = timed(number, title, limit, body)
        print(outcome.line(), flush=True)
        failed += not outcome.passed
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

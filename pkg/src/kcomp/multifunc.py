"""Multiplicative functions of k variables tied to the coprimality families.

Indicators:
    theta(k, s, n)  1 iff gcd(n_1...n_s, n_{s+1}...n_k) = 1
    rho(k, t, n)    1 iff every t of the n_i have gcd 1

and their convolution inverses against the constant-1 function, lambda_ and
psi, so that theta = 1 * lambda_ and rho = 1 * psi. Every function here is
defined by a prime-local rule on an exponent tuple (nu_1, ..., nu_k) and
extended to integer tuples by multiplicativity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Literal, Sequence

import numpy as np

from kcomp import numtheory
from kcomp.numtheory import binomial

ConstraintKind = Literal["all", "split", "twise"]
LocalRule = Callable[[int, int, Sequence[int]], int]


class ConsistencyError(AssertionError):
    """Two independent evaluations of the same quantity disagree."""


@dataclass(frozen=True)
class CoprimalityConstraint:
    kind: ConstraintKind
    k: int
    param: int = 0

    def __post_init__(self) -> None:
        if self.kind == "all":
            if self.k < 2:
                raise ValueError("gcd-of-all constraint needs k >= 2")
        elif self.kind == "split":
            if not 1 <= self.param <= self.k - 1:
                raise ValueError(f"split index s={self.param} must lie in [1, {self.k - 1}]")
        elif self.kind == "twise":
            if not 2 <= self.param <= self.k:
                raise ValueError(f"t={self.param} must lie in [2, {self.k}]")
        else:
            raise ValueError(f"unknown constraint kind {self.kind!r}")

    @classmethod
    def all_coprime(cls, k: int) -> CoprimalityConstraint:
        return cls("all", k)

    @classmethod
    def split(cls, k: int, s: int) -> CoprimalityConstraint:
        return cls("split", k, s)

    @classmethod
    def twise(cls, k: int, t: int) -> CoprimalityConstraint:
        return cls("twise", k, t)

    @property
    def family(self) -> str:
        return {"all": "R", "split": "A", "twise": "B"}[self.kind]


def _check_nu(k: int, nu: Sequence[int]) -> None:
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if len(nu) != k:
        raise ValueError(f"exponent tuple has length {len(nu)}, expected k={k}")
    if any(v < 0 for v in nu):
        raise ValueError(f"exponents must be nonnegative: {tuple(nu)}")


def _check_s(k: int, s: int) -> None:
    if not 1 <= s <= k - 1:
        raise ValueError(f"s={s} must lie in [1, {k - 1}]")


def _check_t(k: int, t: int) -> None:
    if not 2 <= t <= k:
        raise ValueError(f"t={t} must lie in [2, {k}]")


def _check_tuple(k: int, ns: Sequence[int]) -> None:
    if len(ns) != k:
        raise ValueError(f"tuple has length {len(ns)}, expected k={k}")
    if any(v < 1 for v in ns):
        raise ValueError(f"coordinates must be positive: {tuple(ns)}")


# -- prime-local rules --------------------------------------------------------


def theta_local(k: int, s: int, nu: Sequence[int]) -> int:
    _check_nu(k, nu)
    _check_s(k, s)
    return int(not any(nu[:s]) or not any(nu[s:]))


def rho_local(k: int, t: int, nu: Sequence[int]) -> int:
    _check_nu(k, nu)
    _check_t(k, t)
    return int(sum(1 for v in nu if v) <= t - 1)


def lambda_local(k: int, s: int, nu: Sequence[int]) -> int:
    _check_nu(k, nu)
    _check_s(k, s)
    if not any(nu):
        return 1
    if any(v > 1 for v in nu):
        return 0
    if sum(nu[:s]) >= 1 and sum(nu[s:]) >= 1:
        return (-1) ** (sum(nu) - 1)
    return 0


def psi_local(k: int, t: int, nu: Sequence[int]) -> int:
    _check_nu(k, nu)
    _check_t(k, t)
    if not any(nu):
        return 1
    if any(v > 1 for v in nu):
        return 0
    j = sum(nu)
    if j >= t:
        return (-1) ** (j - t + 1) * binomial(j - 1, t - 1)
    return 0


# -- extension by multiplicativity ---------------------------------------------


def support_primes(ns: Sequence[int]) -> list[int]:
    """Primes dividing at least one coordinate (radical of the lcm)."""
    lcm = reduce(math.lcm, ns, 1)
    return numtheory.prime_divisors(lcm)


def exponent_tuple(p: int, ns: Sequence[int]) -> tuple[int, ...]:
    out = []
    for v in ns:
        e = 0
        while v % p == 0:
            v //= p
            e += 1
        out.append(e)
    return tuple(out)


def evaluate_multiplicative(rule: LocalRule, k: int, param: int, ns: Sequence[int]) -> int:
    _check_tuple(k, ns)
    out = 1
    for p in support_primes(ns):
        out *= rule(k, param, exponent_tuple(p, ns))
        if out == 0:
            break
    return out


def lambda_(k: int, s: int, js: Sequence[int]) -> int:
    _check_s(k, s)
    return evaluate_multiplicative(lambda_local, k, s, js)


def psi(k: int, t: int, js: Sequence[int]) -> int:
    _check_t(k, t)
    return evaluate_multiplicative(psi_local, k, t, js)


def theta_direct(k: int, s: int, ns: Sequence[int]) -> int:
    _check_tuple(k, ns)
    _check_s(k, s)
    left = math.prod(ns[:s])
    right = math.prod(ns[s:])
    return int(math.gcd(left, right) == 1)


def rho_direct(k: int, t: int, ns: Sequence[int]) -> int:
    _check_tuple(k, ns)
    _check_t(k, t)
    for idx in itertools.combinations(range(k), t):
        if reduce(math.gcd, (ns[i] for i in idx)) != 1:
            return 0
    return 1


def theta(k: int, s: int, ns: Sequence[int]) -> int:
    """gcd(n_1...n_s, n_{s+1}...n_k) == 1, evaluated twice and cross-checked."""
    direct = theta_direct(k, s, ns)
    local = evaluate_multiplicative(theta_local, k, s, ns)
    if direct != local:
        raise ConsistencyError(f"theta({k},{s},{tuple(ns)}): gcd={direct}, prime-local={local}")
    return direct


def rho(k: int, t: int, ns: Sequence[int]) -> int:
    direct = rho_direct(k, t, ns)
    local = evaluate_multiplicative(rho_local, k, t, ns)
    if direct != local:
        raise ConsistencyError(f"rho({k},{t},{tuple(ns)}): t-subsets={direct}, prime-local={local}")
    return direct


def _pair_for(constraint: CoprimalityConstraint) -> tuple[Callable, Callable]:
    if constraint.kind == "split":
        return lambda_, theta
    if constraint.kind == "twise":
        return psi, rho
    raise ValueError("convolution identities exist for split and t-wise constraints only")


def convolution_check(constraint: CoprimalityConstraint, ns: Sequence[int]) -> bool:
    """Sum over divisor tuples d_i | n_i of lambda_ (psi) equals theta (rho)."""
    inverse, indicator = _pair_for(constraint)
    k, param = constraint.k, constraint.param
    _check_tuple(k, ns)
    total = 0
    for ds in itertools.product(*(numtheory.divisors(v) for v in ns)):
        total += inverse(k, param, ds)
    return total == indicator(k, param, ns)


# -- tables consumed by the numeric kernels ---------------------------------------


def local_rule(constraint: CoprimalityConstraint, which: str = "inverse") -> LocalRule:
    """The prime-local rule for the constraint's inverse or indicator function.

    Looked up through the module namespace on every call, so a patched
    ``lambda_local`` / ``psi_local`` reaches every consumer.
    """
    table = {
        ("split", "inverse"): "lambda_local",
        ("twise", "inverse"): "psi_local",
        ("split", "indicator"): "theta_local",
        ("twise", "indicator"): "rho_local",
    }
    try:
        name = table[(constraint.kind, which)]
    except KeyError:
        raise ValueError(f"no local rule for {constraint.kind}/{which}") from None
    return globals()[name]


def local_table(constraint: CoprimalityConstraint, max_exp: int, which: str = "inverse") -> np.ndarray:
    """Flat int64 table of the local rule over {0..max_exp}^k, C order.

    Entry index is sum(nu_i * (max_exp+1)**(k-1-i)).
    """
    rule = local_rule(constraint, which)
    k, param = constraint.k, constraint.param
    vals = [rule(k, param, nu) for nu in itertools.product(range(max_exp + 1), repeat=k)]
    return np.asarray(vals, dtype=np.int64)


def max_exponent(limit: int) -> int:
    """Largest exponent of any prime in integers <= limit."""
    return max(1, limit.bit_length() - 1)


def diagonal_lambda(k: int, delta: int) -> int:
    """(-1)^((k-1) omega(delta)) mu^2(delta): closed form of lambda_ on (delta,...,delta)."""
    if not numtheory.is_squarefree(delta):
        return 0
    return (-1) ** ((k - 1) * numtheory.omega(delta))


def diagonal_psi(k: int, t: int, delta: int) -> int:
    """((-1)^(k-t+1) C(k-1,t-1))^omega(delta) mu^2(delta): closed form of psi on the diagonal."""
    if not numtheory.is_squarefree(delta):
        return 0
    return ((-1) ** (k - t + 1) * binomial(k - 1, t - 1)) ** numtheory.omega(delta)

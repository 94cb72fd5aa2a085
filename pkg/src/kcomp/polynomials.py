"""Exact integer polynomials F_{k,s} and G_{k,t} that drive the Euler factors."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from kcomp.numtheory import binomial


@dataclass(frozen=True)
class IntegerPolynomial:
    """Dense polynomial, coefficients in ascending degree order."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        c = list(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c) or (0,))

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int]) -> IntegerPolynomial:
        return cls(tuple(coeffs))

    @classmethod
    def monomial(cls, degree: int, coeff: int = 1) -> IntegerPolynomial:
        return cls((0,) * degree + (coeff,))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        if self.coeffs == (0,):
            return -1
        return len(self.coeffs) - 1

    def __add__(self, other: IntegerPolynomial) -> IntegerPolynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntegerPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> IntegerPolynomial:
        return IntegerPolynomial(tuple(-x for x in self.coeffs))

    def __sub__(self, other: IntegerPolynomial) -> IntegerPolynomial:
        return self + (-other)

    def __mul__(self, other: IntegerPolynomial | int) -> IntegerPolynomial:
        if isinstance(other, int):
            return IntegerPolynomial(tuple(other * x for x in self.coeffs))
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return IntegerPolynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> IntegerPolynomial:
        out = IntegerPolynomial((1,))
        for _ in range(e):
            out = out * self
        return out

    def divide_by_x(self) -> IntegerPolynomial:
        if self.coeffs[0] != 0:
            raise ArithmeticError(f"constant term {self.coeffs[0]} != 0; division by x is not exact")
        return IntegerPolynomial(self.coeffs[1:] or (0,))

    def __call__(self, x: int | Fraction) -> int | Fraction:
        return eval_poly(self, x)


X = IntegerPolynomial((0, 1))
X_MINUS_1 = IntegerPolynomial((-1, 1))
ONE = IntegerPolynomial((1,))


def eval_poly(p: IntegerPolynomial, x: int | Fraction) -> int | Fraction:
    acc = 0
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def _check_ks(k: int, s: int) -> None:
    if k < 3 or not 1 <= s <= k - 1:
        raise ValueError(f"F_(k,s) needs k >= 3 and 1 <= s <= k-1, got k={k}, s={s}")


def _check_kt(k: int, t: int) -> None:
    if k < 3 or not 2 <= t <= k:
        raise ValueError(f"G_(k,t) needs k >= 3 and 2 <= t <= k, got k={k}, t={t}")


@lru_cache(maxsize=None)
def build_F(k: int, s: int) -> IntegerPolynomial:
    """(x^k + (x-1)^k - x^s (x-1)^(k-s) - x^(k-s) (x-1)^s + (-1)^(k-1)) / x."""
    _check_ks(k, s)
    bracket = (
        X**k
        + X_MINUS_1**k
        - X**s * X_MINUS_1 ** (k - s)
        - X ** (k - s) * X_MINUS_1**s
        + ONE * (-1) ** (k - 1)
    )
    return bracket.divide_by_x()


def _G_binomial_form(k: int, t: int) -> IntegerPolynomial:
    acc = ONE * ((-1) ** (k - t) * binomial(k - 1, t - 1))
    for j in range(t):
        acc = acc + X_MINUS_1 ** (k - j) * binomial(k, j)
    return acc.divide_by_x()


def _G_monomial_form(k: int, t: int) -> IntegerPolynomial:
    acc = X**k
    for j in range(t, k):
        acc = acc - IntegerPolynomial.monomial(k - j, (-1) ** (j - t) * binomial(k, j) * binomial(j - 1, t - 1))
    return acc.divide_by_x()


@lru_cache(maxsize=None)
def build_G(k: int, t: int) -> IntegerPolynomial:
    """G_{k,t}, built from both of its closed forms; they must agree exactly."""
    _check_kt(k, t)
    first = _G_binomial_form(k, t)
    second = _G_monomial_form(k, t)
    if first != second:
        raise ArithmeticError(f"G_({k},{t}) forms disagree: {first.coeffs} vs {second.coeffs}")
    return first


def elementary_symmetric(j: int, values: Sequence[Fraction | int]) -> Fraction:
    """e_j(values) via the product expansion prod (1 + v_i z)."""
    if j < 0 or j > len(values):
        return Fraction(0)
    e = [Fraction(1)] + [Fraction(0)] * j
    for v in values:
        for i in range(j, 0, -1):
            e[i] += e[i - 1] * v
    return e[j]


def H_local_factor(k: int, s: int, p: int) -> Fraction:
    """1 - (p F_{k,s}(p) + (-1)^k) / p^k."""
    F = build_F(k, s)
    return 1 - Fraction(p * eval_poly(F, p) + (-1) ** k, p**k)


def H_local_factor_direct(k: int, s: int, p: int) -> Fraction:
    """(1-1/p)^s + (1-1/p)^(k-s) - (1-1/p)^k."""
    u = 1 - Fraction(1, p)
    return u**s + u ** (k - s) - u**k


def L_local_factor(k: int, t: int, p: int) -> Fraction:
    """(p G_{k,t}(p) + (-1)^(k-t+1) C(k-1,t-1)) / p^k."""
    G = build_G(k, t)
    return Fraction(p * eval_poly(G, p) + (-1) ** (k - t + 1) * binomial(k - 1, t - 1), p**k)


def L_local_factor_direct(k: int, t: int, p: int) -> Fraction:
    """1 - sum_{j=t}^{k} (-1)^(j-t) C(j-1,t-1) e_j(1/p, ..., 1/p)."""
    vals = [Fraction(1, p)] * k
    acc = Fraction(1)
    for j in range(t, k + 1):
        acc -= (-1) ** (j - t) * binomial(j - 1, t - 1) * elementary_symmetric(j, vals)
    return acc

"""Counting k-compositions of n under coprimality constraints.

Exact counts (enumeration and divisor-sum identities), the multiplicative
functions behind the identities, restricted partition counts, and the
Euler-product constants of the main terms.
"""

from kcomp.counting import BudgetExceeded, CountQuery, brute_count, identity_count, jordan_R, mobius_R
from kcomp.multifunc import CoprimalityConstraint

__all__ = [
    "BudgetExceeded",
    "CoprimalityConstraint",
    "CountQuery",
    "brute_count",
    "identity_count",
    "jordan_R",
    "mobius_R",
]
__version__ = "0.1.0"

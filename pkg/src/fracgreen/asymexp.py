"""Truncated expansions at infinity built from rational terms.

An :class:`AsymptoticSum` stands for ``sum(terms) + O(x**-N)``.  Terms are
kept as a plain list without bringing them to a common denominator;
equality is decided by the order at infinity of the difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ratfun import (
    RationalFn,
    RationalFnError,
    jump,
    order_at_infinity,
    rf_arith,
    rf_const,
    rf_scale,
)


class AsymptoticError(ValueError):
    pass


@dataclass(frozen=True)
class AsymptoticSum:
    terms: tuple
    remainder_order: int

    def __post_init__(self):
        kept = tuple(
            t for t in self.terms if not t.is_zero and order_at_infinity(t) > -self.remainder_order
        )
        object.__setattr__(self, "terms", kept)

    def __call__(self, x):
        return sum((t(x) for t in self.terms), np.zeros_like(np.asarray(x, dtype=complex)))

    @property
    def leading_order(self):
        return max((order_at_infinity(t) for t in self.terms), default=-math.inf)


def as_make(terms, remainder_order: int = 2) -> AsymptoticSum:
    return AsymptoticSum(tuple(terms), int(remainder_order))


def as_unit(remainder_order: int = 2) -> AsymptoticSum:
    return as_make([rf_const(1.0)], remainder_order)


def as_add(s1: AsymptoticSum, s2: AsymptoticSum) -> AsymptoticSum:
    return as_make(s1.terms + s2.terms, min(s1.remainder_order, s2.remainder_order))


def as_scale(s: AsymptoticSum, c: complex) -> AsymptoticSum:
    return as_make([rf_scale(t, c) for t in s.terms], s.remainder_order)


def as_mul(s1: AsymptoticSum, s2: AsymptoticSum) -> AsymptoticSum:
    """Product of truncated sums, with the remainder order both factors allow."""
    n1, n2 = s1.remainder_order, s2.remainder_order
    cands = [n1 + n2]
    if s1.terms:
        cands.append(n2 - s1.leading_order)
    if s2.terms:
        cands.append(n1 - s2.leading_order)
    n = int(min(cands))
    terms = []
    for t1 in s1.terms:
        o1 = order_at_infinity(t1)
        for t2 in s2.terms:
            if o1 + order_at_infinity(t2) > -n:
                terms.append(rf_arith("mul", t1, t2))
    return as_make(terms, n)


def _binom(a: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= (a - j) / (j + 1)
    return out


def as_binomial_power(t: AsymptoticSum, a: float) -> AsymptoticSum:
    """``(1 + t)**a`` expanded as ``sum_k C(a, k) t**k`` up to the remainder of ``t``."""
    for term in t.terms:
        if order_at_infinity(term) > -1:
            raise AsymptoticError("binomial expansion needs every term of order <= -1")
    n = t.remainder_order
    out = as_unit(n)
    power = as_unit(n)
    for k in range(1, n):
        power = as_mul(power, t)
        if not power.terms:
            break
        out = as_add(out, as_scale(power, _binom(a, k)))
    return as_make(out.terms, n)


def as_jump(s: AsymptoticSum) -> complex:
    """Sum of the jumps of the proper parts of the terms; constants are dropped."""
    if s.remainder_order < 2:
        raise AsymptoticError("the jump is not determined when the remainder is O(x^-1)")
    total = 0j
    for t in s.terms:
        if order_at_infinity(t) > 0:
            raise AsymptoticError("term grows at infinity; no jump defined")
        try:
            total += jump(t)
        except RationalFnError as exc:
            raise AsymptoticError(str(exc)) from exc
    return total


def as_collapse(s: AsymptoticSum) -> RationalFn:
    """All terms summed into a single rational function."""
    out = rf_const(0.0)
    for t in s.terms:
        out = rf_arith("add", out, t)
    return out


def as_difference_order(s1: AsymptoticSum, s2: AsymptoticSum):
    diff = rf_arith("add", as_collapse(s1), rf_scale(as_collapse(s2), -1.0))
    return order_at_infinity(diff)


def as_equal(s1: AsymptoticSum, s2: AsymptoticSum) -> bool:
    """Equality up to the common remainder order."""
    n = min(s1.remainder_order, s2.remainder_order)
    return as_difference_order(s1, s2) <= -n

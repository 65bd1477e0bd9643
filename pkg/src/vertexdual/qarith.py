"""Exact rational scalars and symmetric q-deformed combinatorics.

Every value is a `fractions.Fraction`, so all arithmetic is exact.  The
q-integers used here are the symmetric (balanced) ones, invariant under
q -> 1/q, and defined for every nonzero rational q including q = 1 and
q = -1.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

Rational = Fraction


def rational(value) -> Fraction:
    """Parse a rational from "p/q" or "p" strings, ints, or Fractions."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rational(x: Fraction) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1."""
    return str(Fraction(x))


@lru_cache(maxsize=None)
def qpow(q: Fraction, e: int) -> Fraction:
    """q**e for integer e, negative exponents allowed for q != 0."""
    if q == 0 and e < 0:
        raise ZeroDivisionError("0 cannot be raised to a negative power")
    return q ** e


def _require_q(q: Fraction) -> Fraction:
    q = Fraction(q)
    if q == 0:
        raise ValueError("q must be nonzero")
    return q


@lru_cache(maxsize=None)
def q_int(k: int, q: Fraction) -> Fraction:
    """Balanced q-integer: sum of q**(k-1-2i) for i in 0..k-1.

    Agrees with (q**k - q**-k)/(q - 1/q) whenever q**2 != 1, but is
    defined (and equals +-k) at q = +-1 as well.
    """
    q = _require_q(q)
    if k < 0:
        raise ValueError("k must be nonnegative")
    total = Fraction(0)
    for i in range(k):
        total += qpow(q, k - 1 - 2 * i)
    return total


@lru_cache(maxsize=None)
def q_fact(k: int, q: Fraction) -> Fraction:
    """q-factorial [1]_q [2]_q ... [k]_q, with [0]!_q = 1."""
    q = _require_q(q)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return Fraction(1)
    return q_fact(k - 1, q) * q_int(k, q)


@lru_cache(maxsize=None)
def q_binom(n: int, k: int, q: Fraction) -> Fraction:
    """q-binomial [n]!/([k]![n-k]!); zero when k < 0 or n < k."""
    q = _require_q(q)
    if k < 0 or n < k:
        return Fraction(0)
    return q_fact(n, q) / (q_fact(k, q) * q_fact(n - k, q))

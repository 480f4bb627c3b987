"""Exact rational scalars.

Everything geometric in the package is computed with ``gmpy2.mpq``; floats
only appear in entropy estimates and plots.
"""
from __future__ import annotations

from fractions import Fraction

import gmpy2

Q = gmpy2.mpq
ZERO = Q(0)
ONE = Q(1)
HALF = Q(1, 2)


def q(value) -> gmpy2.mpq:
    """Coerce ints, Fractions, mpq and ``"p/q"`` strings to ``mpq``.

    Floats are rejected: they would silently break exactness.
    """
    if isinstance(value, type(ZERO)):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Q(value)
    if isinstance(value, Fraction):
        return Q(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Q(Fraction(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}; pass a 'p/q' string")
    raise TypeError(f"cannot interpret {value!r} as a rational")


def fmt(value) -> str:
    """Serialize as ``"p/q"`` (or ``"p"`` for integers)."""
    value = q(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def pow2(k: int) -> gmpy2.mpq:
    return Q(1, 2**k) if k >= 0 else Q(2 ** (-k))


def simplest_between(lo, hi) -> gmpy2.mpq:
    """Smallest-denominator rational in the open interval (lo, hi)."""
    lo, hi = q(lo), q(hi)
    if not lo < hi:
        raise ValueError("empty interval")
    return _simplest(lo, hi)


def _simplest(a, b):
    # open interval (a, b); b may be None for +infinity
    fl = Q(int(gmpy2.floor(a)))
    if b is None or fl + 1 < b:
        return fl + 1
    if a == fl:
        return fl + 1 / _simplest(1 / (b - fl), None)
    return fl + 1 / _simplest(1 / (b - fl), 1 / (a - fl))

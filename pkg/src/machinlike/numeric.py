"""Fixed-point arctangent kernel with a rigorous error bound.

All routines return integers ``R`` approximating ``2**bits * value``.  The
arctangent of a rational ``p/q`` with ``0 <= p <= q`` uses Euler's series

    arctan(p/q) = pq/(p^2+q^2) * sum_n (2n)!!/(2n+1)!! * (p^2/(p^2+q^2))^n

whose ratio is at most 1/2, so every term is positive and the truncation
error is easy to bound.  With ``bitlen(bits) + 8`` guard bits the summed
floor errors stay below one output ulp, which gives ``|R - 2**bits*v| < 2``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath.libmp import from_man_exp

# Absolute error of every *_fixed routine, in output ulps (strict bound).
ULP_ERROR = 2


def _guard(bits: int) -> int:
    return bits.bit_length() + 8


def _atan_small(p: int, q: int, bits: int) -> int:
    # 0 <= p <= q, q > 0
    if p == 0:
        return 0
    g = _guard(bits)
    w = bits + g
    norm = p * p + q * q
    p2 = p * p
    term = (p * q << w) // norm
    total = term
    n = 1
    while term:
        term = term * (2 * n) * p2 // ((2 * n + 1) * norm)
        total += term
        n += 1
    return total >> g


@lru_cache(maxsize=64)
def pi_fixed(bits: int) -> int:
    """``2**bits * pi`` with error < 2 ulp (Machin's formula on the kernel)."""
    w = bits + 8
    # error <= 16*2 + 4*2 = 40 ulp at w, i.e. < 1/6 ulp at bits before the floor
    s = 16 * _atan_small(1, 5, w) - 4 * _atan_small(1, 239, w)
    return s >> 8


def atan_fixed(p: int, q: int, bits: int) -> int:
    """``2**bits * arctan(p/q)`` for integers p, q (q != 0), error < 2 ulp."""
    if q == 0:
        raise ZeroDivisionError("arctan argument has zero denominator")
    if q < 0:
        p, q = -p, -q
    if p < 0:
        return -atan_fixed(-p, q, bits)
    if p <= q:
        return _atan_small(p, q, bits)
    # arctan(x) = pi/2 - arctan(1/x) for x > 1
    w = bits + 4
    s = (pi_fixed(w) >> 1) - _atan_small(q, p, w)
    return s >> 4


def to_mpf(man: int, bits: int) -> mpmath.mpf:
    """Exact ``man * 2**-bits`` as an mpf (no rounding)."""
    return mpmath.mp.make_mpf(from_man_exp(man, -bits))


def arctan_real(x: Fraction, bits: int) -> mpmath.mpf:
    x = Fraction(x)
    return to_mpf(atan_fixed(x.numerator, x.denominator, bits), bits)


def pi_real(bits: int) -> mpmath.mpf:
    return to_mpf(pi_fixed(bits), bits)


def sum_fixed(pairs, bits: int) -> tuple[int, int]:
    """Evaluate ``sum c * arctan(x)`` over ``(c, x)`` pairs.

    Returns ``(S, w)`` with ``|S * 2**-w - value| < 2**-bits``.
    """
    weight = sum(abs(c) for c, _ in pairs) * ULP_ERROR
    w = bits + weight.bit_length() + 1
    s = 0
    for c, x in pairs:
        x = Fraction(x)
        s += c * atan_fixed(x.numerator, x.denominator, w)
    return s, w

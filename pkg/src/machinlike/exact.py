"""Exact arithmetic for arctangent relations.

A relation ``sum c_n * arctan(a_n/b_n) = k * pi/4`` holds exactly when the
Gaussian product ``prod (b_n + a_n i)^c_n`` equals ``u * (1+i)^k`` for a
positive rational ``u``.  The product fixes ``k`` modulo 8; the absolute
value of ``k`` comes from the numeric kernel in :mod:`machinlike.numeric`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import mpmath

from .errors import (
    MeasureUndefined,
    NotTwoOver,
    PoleError,
    WindingUnresolved,
)
from .numeric import pi_fixed, sum_fixed, to_mpf

Rational = Fraction

LAMBDA_DIGITS = 40


# ---------------------------
# Terms and relations
# ---------------------------

@dataclass(frozen=True, order=False)
class Term:
    coeff: int
    arg: Fraction

    def __post_init__(self):
        arg = Fraction(self.arg)
        object.__setattr__(self, "arg", arg)
        if not isinstance(self.coeff, int) or self.coeff == 0:
            raise ValueError(f"term coefficient must be a nonzero integer, got {self.coeff!r}")
        if not 0 < arg < 1:
            raise ValueError(f"term argument must lie in (0, 1), got {arg}")

    @classmethod
    def acot(cls, coeff: int, x: int) -> "Term":
        return cls(coeff, Fraction(1, x))

    @property
    def a(self) -> int:
        return self.arg.numerator

    @property
    def b(self) -> int:
        return self.arg.denominator

    def sort_key(self) -> tuple[int, int]:
        return (self.b, self.a)

    def render(self) -> str:
        inner = str(self.b) if self.a == 1 else f"{self.a}/{self.b}"
        return f"{self.coeff:+d}[{inner}]"


def _merge_terms(terms: Iterable[Term]) -> tuple[Term, ...]:
    acc: dict[Fraction, int] = {}
    for t in terms:
        acc[t.arg] = acc.get(t.arg, 0) + t.coeff
    merged = [Term(c, x) for x, c in acc.items() if c != 0]
    merged.sort(key=Term.sort_key)
    return tuple(merged)


@dataclass(frozen=True)
class Relation:
    """``sum(t.coeff * arctan(t.arg) for t in terms) == k * pi / 4``.

    Terms are merged by argument and sorted by (denominator, numerator) on
    construction.  Sign and gcd normalisation is done by :meth:`canonical`.
    """

    k: int
    terms: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", _merge_terms(self.terms))

    @classmethod
    def acot(cls, k: int, pairs: Iterable[tuple[int, int]]) -> "Relation":
        """Build from ``(coeff, x)`` pairs meaning ``coeff * acot(x)``."""
        return cls(k, tuple(Term.acot(c, x) for c, x in pairs))

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def is_zero_relation(self) -> bool:
        return self.k == 0

    def canonical(self) -> "Relation":
        if not self.terms:
            return Relation(0, ())
        sign = 1
        if self.k < 0 or (self.k == 0 and self.terms[0].coeff < 0):
            sign = -1
        g = reduce(math.gcd, (abs(t.coeff) for t in self.terms), abs(self.k))
        return Relation(sign * self.k // g, tuple(Term(sign * t.coeff // g, t.arg) for t in self.terms))

    def key(self) -> tuple:
        c = self.canonical()
        return (c.k, tuple((t.coeff, t.a, t.b) for t in c.terms))

    def scaled(self, factor: int) -> "Relation":
        return Relation(self.k * factor, tuple(Term(t.coeff * factor, t.arg) for t in self.terms))

    def max_denominator(self) -> int:
        return max((t.b for t in self.terms), default=0)

    def render(self) -> str:
        body = "".join(t.render() for t in self.terms)
        if body.startswith("+"):
            body = body[1:]
        return f"{self.k}/4·π = {body or '0'}"

    def __str__(self) -> str:
        return self.render()


_TERM_RE = re.compile(r"([+-]?)\s*(\d*)\s*\*?\s*\[\s*(\d+)\s*(?:/\s*(\d+)\s*)?\]")


def _parse_lhs(text: str) -> int:
    s = text.replace(" ", "").replace("π", "pi").replace("·", "").replace("*", "").lower()
    if s in ("0", ""):
        return 0
    m = re.fullmatch(r"(-?\d*)/4pi", s) or re.fullmatch(r"(-?\d*)pi/4", s)
    if m:
        return int(m.group(1)) if m.group(1) not in ("", "-") else (-1 if m.group(1) == "-" else 1)
    m = re.fullmatch(r"(-?\d*)pi", s)
    if m:
        c = int(m.group(1)) if m.group(1) not in ("", "-") else (-1 if m.group(1) == "-" else 1)
        return 4 * c
    raise ValueError(f"cannot parse relation left-hand side {text!r}")


def parse_relation(text: str) -> Relation:
    """Parse the bracket notation, e.g. ``"π/4 = 4[5]-1[239]"``.

    ``[x]`` is ``acot(x)``; ``[a/b]`` is ``arctan(a/b)``.  Without an ``=``
    the relation is taken to sum to pi/4.
    """
    k = 1
    body = text.strip()
    if "=" in body:
        left, right = (s.strip() for s in body.split("=", 1))
        if "[" in left:
            left, right = right, left
        k = _parse_lhs(left)
        body = right
    terms = []
    pos = 0
    stripped = body.replace(" ", "")
    for m in _TERM_RE.finditer(stripped):
        if stripped[pos:m.start()].strip():
            raise ValueError(f"unexpected text {stripped[pos:m.start()]!r} in relation")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        coeff = sign * (int(m.group(2)) if m.group(2) else 1)
        if m.group(4) is None:
            arg = Fraction(1, int(m.group(3)))
        else:
            arg = Fraction(int(m.group(3)), int(m.group(4)))
        terms.append(Term(coeff, arg))
    if stripped[pos:].strip(" ."):
        raise ValueError(f"unexpected trailing text {stripped[pos:]!r} in relation")
    if not terms:
        raise ValueError(f"no terms found in {text!r}")
    return Relation(k, tuple(terms))


# ---------------------------
# Gaussian rationals
# ---------------------------

@dataclass(frozen=True)
class GaussianRational:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other: "GaussianRational") -> "GaussianRational":
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * other.conj()
        return GaussianRational(num.re / n, num.im / n)

    def __pow__(self, e: int) -> "GaussianRational":
        if e < 0:
            return GaussianRational(1) / (self ** -e)
        result = GaussianRational(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result


def _gmul(x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
    a, b = x
    c, d = y
    return (a * c - b * d, a * d + b * c)


def _gpow(z: tuple[int, int], e: int) -> tuple[int, int]:
    result = (1, 0)
    while e:
        if e & 1:
            result = _gmul(result, z)
        e >>= 1
        if e:
            z = _gmul(z, z)
    return result


def _gprod(items: Sequence[tuple[int, int]]) -> tuple[int, int]:
    items = list(items)
    if not items:
        return (1, 0)
    while len(items) > 1:
        nxt = [_gmul(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


# ---------------------------
# Tangent identities
# ---------------------------

def arctan_add(x: Fraction, y: Fraction) -> Fraction:
    """Tangent of ``arctan(x) + arctan(y)``; winding is the caller's concern."""
    x, y = Fraction(x), Fraction(y)
    den = 1 - x * y
    if den == 0:
        raise PoleError(f"arctan({x}) + arctan({y}) is an odd multiple of pi/2")
    return (x + y) / den


def arctan_scale(c: int, x: Fraction) -> Fraction:
    """Tangent of ``c * arctan(x)`` by repeated :func:`arctan_add`."""
    if c < 1:
        raise ValueError("scale factor must be >= 1")
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    # (re, im) of (q + p i)^j; tangent im/re.  A zero real part is a pole.
    re_, im_ = q, p
    for _ in range(c - 1):
        re_, im_ = re_ * q - im_ * p, re_ * p + im_ * q
        if re_ == 0:
            raise PoleError(f"multiple of arctan({x}) reaches pi/2")
    return Fraction(im_, re_)


def expand_two_over_coeff(coeff: int, a: int) -> list[Term]:
    """``coeff*arctan(2/a) = 2*coeff*acot(a) - coeff*acot((a^3+3a)/2)``."""
    if a < 2:
        raise NotTwoOver(f"expansion needs a >= 2, got {a}")
    big = a * a * a + 3 * a
    # a and a^2+3 have opposite parity, so big is always even
    assert big % 2 == 0
    return [Term.acot(2 * coeff, a), Term.acot(-coeff, big // 2)]


def expand_two_over(t: Term) -> list[Term]:
    if t.a != 2:
        raise NotTwoOver(f"term argument {t.arg} does not have numerator 2")
    return expand_two_over_coeff(t.coeff, t.b)


def expand_relation(rel: Relation) -> Relation:
    """Rewrite every ``arctan(2/a)`` term of a relation as unit-numerator terms."""
    out: list[Term] = []
    for t in rel.terms:
        if t.a == 2:
            out.extend(expand_two_over(t))
        else:
            out.append(t)
    return Relation(rel.k, tuple(out))


# ---------------------------
# Lehmer measure
# ---------------------------

def lehmer_measure(rel: Relation) -> Decimal:
    """Sum of ``1/log10(b/a)`` over the terms; coefficients do not enter."""
    with localcontext() as ctx:
        ctx.prec = LAMBDA_DIGITS
        total = Decimal(0)
        for t in rel.terms:
            if t.arg >= 1:
                raise MeasureUndefined(f"argument {t.arg} >= 1 has no Lehmer weight")
            total += 1 / (Decimal(t.b).log10() - Decimal(t.a).log10())
        return +total


def format_lambda(value: Decimal, places: int = 4) -> str:
    q = Decimal(1).scaleb(-places)
    with localcontext() as ctx:
        ctx.prec = LAMBDA_DIGITS
        return str(value.quantize(q, rounding=ROUND_HALF_EVEN))


# ---------------------------
# Numeric evaluation and certification
# ---------------------------

def eval_numeric(rel: Relation, precision_bits: int = 256) -> mpmath.mpf:
    """``sum c * arctan(arg)`` with absolute error below ``2**-precision_bits``."""
    if precision_bits < 64:
        raise ValueError("precision_bits must be >= 64")
    s, w = sum_fixed([(t.coeff, t.arg) for t in rel.terms], precision_bits)
    return to_mpf(s, w)


def nearest_quarter_pi(rel: Relation, precision_bits: int = 256, residue: int | None = None) -> tuple[int, bool]:
    """Integer k with the relation's angle closest to ``k*pi/4``.

    When ``residue`` is given, k is restricted to that class mod 8.  The
    flag says whether the angle is within ``2**-(precision_bits-8)`` of it.
    """
    s, w = sum_fixed([(t.coeff, t.arg) for t in rel.terms], precision_bits)
    pi_w = pi_fixed(w)
    if residue is None:
        k = (8 * s + pi_w) // (2 * pi_w)
    else:
        # k = residue + 8 j, nearest j
        j = (4 * s - residue * pi_w + 4 * pi_w) // (8 * pi_w)
        k = residue + 8 * j
    diff = abs(4 * s - k * pi_w)
    tol = 4 << (w - precision_bits + 8)
    return k, diff <= tol


@dataclass(frozen=True)
class VerificationReport:
    valid: bool
    k: int
    u: Fraction | None
    residual_bits: int


def _octant(re_: int, im_: int) -> int | None:
    """j in 0..7 with re + im*i a positive multiple of (1+i)^j, else None."""
    if im_ == 0:
        return 0 if re_ > 0 else 4 if re_ < 0 else None
    if re_ == 0:
        return 2 if im_ > 0 else 6
    if re_ == im_:
        return 1 if re_ > 0 else 5
    if re_ == -im_:
        return 3 if im_ > 0 else 7
    return None


def gaussian_product(rel: Relation) -> tuple[tuple[int, int], int]:
    """``prod (b + a i)^c`` as ``(gaussian integer numerator, positive denominator)``."""
    factors = []
    den = 1
    for t in rel.terms:
        a, b, c = t.a, t.b, t.coeff
        if c > 0:
            factors.append(_gpow((b, a), c))
        else:
            factors.append(_gpow((b, -a), -c))
            den *= (a * a + b * b) ** (-c)
    return _gprod(factors), den


def verify_exact(rel: Relation, start_bits: int = 256, max_bits: int = 4096) -> VerificationReport:
    """Certify ``rel`` exactly; the numeric kernel only fixes the winding."""
    if not rel.terms:
        raise ValueError("cannot verify an empty relation")
    (re_, im_), den = gaussian_product(rel)
    j = _octant(re_, im_)
    bits = start_bits
    while True:
        k, close = nearest_quarter_pi(rel, bits, residue=j)
        if close or j is None:
            break
        if bits >= max_bits:
            raise WindingUnresolved(f"angle is exact mod 2pi but not within tolerance at {bits} bits")
        bits *= 2
    if j is None:
        return VerificationReport(False, k, None, bits)
    # u = P / (1+i)^k = num * (1-i)^j / (den * 2^j) / 16^((k-j)/8)
    ur, ui = _gmul((re_, im_), _gpow((1, -1), j))
    assert ui == 0 and ur > 0
    u = Fraction(ur, den << j)
    w = (k - j) // 8
    u = u / 16 ** w if w >= 0 else u * 16 ** (-w)
    return VerificationReport(k == rel.k, k, u, bits)

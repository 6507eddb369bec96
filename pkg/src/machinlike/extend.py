"""Lengthening relations with Alferov's greedy completion.

A remainder angle arctan(a/b) is reduced by subtracting acot(q) with q near
b/|a|; each step strictly shrinks |a|, so the process ends at a = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import reduce

from .errors import DigitCapExceeded, InvalidInput, PoleError
from .exact import Relation, Term, arctan_add, arctan_scale, nearest_quarter_pi
from .numeric import atan_fixed, pi_fixed

WINDING_BITS = 128


class Strategy(str, Enum):
    MIN_REMAINDER = "MinRemainder"
    MIN_NUMERATOR = "MinNumeratorAfterGcd"


@dataclass(frozen=True)
class AngleRemainder:
    tangent: Fraction
    winding: int = 0


@dataclass
class ExtendConfig:
    strategy: Strategy = Strategy.MIN_REMAINDER
    digit_cap_bits: int = 1000

    def __post_init__(self):
        self.strategy = Strategy(self.strategy)
        if self.digit_cap_bits < 64:
            raise InvalidInput("digit_cap_bits must be >= 64")


@dataclass
class Step:
    a_bits: int
    b_bits: int
    divisor: int
    sign: int
    choice: str

    def to_json(self) -> dict:
        return {"a_bits": self.a_bits, "b_bits": self.b_bits, "sign": self.sign,
                "choice": self.choice, "divisor_bits": self.divisor.bit_length()}


@dataclass
class Completion:
    terms: list[Term]
    steps: list[Step] = field(default_factory=list)


def _angle_fixed(m: int, q0: int, bits: int) -> int:
    return m * atan_fixed(1, q0, bits)


def alferov_remainder(m: int, q0: int) -> AngleRemainder:
    """Exact tangent of ``pi/4 - m*acot(q0)``."""
    if m < 1 or q0 < 2:
        raise InvalidInput("need m >= 1 and q0 >= 2")
    bits = WINDING_BITS
    theta = _angle_fixed(m, q0, bits)
    half_pi = pi_fixed(bits) >> 1
    if not 0 < theta < half_pi - 4 * m:
        raise InvalidInput(f"{m}*acot({q0}) is not inside (0, pi/2)")
    t = arctan_scale(m, Fraction(1, q0))
    # pi/4 - theta lies in (-pi/4, pi/4), so the tangent needs no winding
    r = arctan_add(Fraction(1), -t)
    return AngleRemainder(r, 0)


def _step(a: int, b: int, q: int) -> tuple[int, int]:
    """Remainder after removing sign(a)*acot(q) from arctan(a/b), reduced."""
    if a > 0:
        na, nb = a * q - b, b * q + a
    else:
        na, nb = a * q + b, b * q - a
    g = math.gcd(na, nb)
    return na // g, nb // g


def alferov_complete(r: AngleRemainder | Fraction, cfg: ExtendConfig | None = None,
                     trace: list[Step] | None = None) -> list[Term]:
    """Unit-coefficient acot terms whose angles sum to ``arctan(r.tangent)``."""
    cfg = cfg or ExtendConfig()
    tangent = r.tangent if isinstance(r, AngleRemainder) else Fraction(r)
    a, b = tangent.numerator, tangent.denominator
    if a != 0 and not abs(a) < b:
        raise InvalidInput(f"remainder {tangent} must satisfy |tangent| < 1")
    cap = 1 << cfg.digit_cap_bits
    terms: list[Term] = []
    while a != 0:
        sign = 1 if a > 0 else -1
        q = b // abs(a)
        if b % abs(a) == 0 and q >= 2:
            options = [q]
        else:
            options = [d for d in (q, q + 1) if d >= 2]
        best = None
        for d in options:
            na, nb = _step(a, b, d)
            if cfg.strategy is Strategy.MIN_REMAINDER:
                key = (abs(Fraction(na, nb)), d)
            else:
                key = (abs(na), d)
            if best is None or key < best[0]:
                best = (key, d, na, nb)
        _, d, na, nb = best
        if not abs(na) < abs(a):
            raise AssertionError(f"numerator did not decrease: {a} -> {na}")
        if trace is not None:
            trace.append(Step(abs(a).bit_length(), b.bit_length(), d, sign,
                              "floor" if d == q else "floor+1"))
        terms.append(Term.acot(sign, d))
        a, b = na, nb
        if b > cap:
            raise DigitCapExceeded(f"remainder denominator exceeds 2^{cfg.digit_cap_bits}",
                                   partial=terms, remainder=Fraction(a, b))
    return terms


def alferov_relation(m: int, q0: int, cfg: ExtendConfig | None = None,
                     trace: list[Step] | None = None) -> Relation:
    """``pi/4 = m*acot(q0) + completion`` as a relation."""
    rem = alferov_remainder(m, q0)
    terms = [Term.acot(m, q0)] + alferov_complete(rem, cfg, trace)
    return Relation(1, tuple(terms))


def _tangent_of_sum(terms: list[tuple[int, Fraction]]) -> tuple[Fraction | None, int]:
    """Tangent of ``sum c*arctan(x)`` and the nearest multiple of pi removed.

    Returns ``(tangent, w)`` with the angle equal to ``arctan(tangent) + w*pi``;
    ``tangent`` is None when the angle sits on an odd multiple of pi/2.
    """
    t = Fraction(0)
    for c, x in terms:
        if c == 0:
            continue
        s = arctan_scale(abs(c), x)
        t = arctan_add(t, s if c > 0 else -s)
    bits = WINDING_BITS
    angle = sum(c * atan_fixed(x.numerator, x.denominator, bits) for c, x in terms)
    pi_b = pi_fixed(bits)
    w = (2 * angle + pi_b) // (2 * pi_b)
    return t, w


def truncate_and_extend(rel: Relation, keep: int, cfg: ExtendConfig | None = None,
                        trace: list[Step] | None = None) -> Relation:
    """Keep the first ``keep`` terms and regrow the tail with Alferov's process.

    The dropped tail's coefficients share a gcd g; the tail angle is g times
    an angle psi, and psi is completed so every new term carries +-g.
    """
    cfg = cfg or ExtendConfig()
    n = len(rel.terms)
    if keep >= n:
        return rel
    if keep < 1:
        raise InvalidInput("keep must be >= 1")
    kept = list(rel.terms[:keep])
    dropped = list(rel.terms[keep:])
    g = reduce(math.gcd, (abs(t.coeff) for t in dropped))
    tan_psi, w = _tangent_of_sum([(t.coeff // g, t.arg) for t in dropped])
    if w != 0:
        raise InvalidInput("dropped tail wraps past pi/2; cannot complete")
    if tan_psi == 0:
        return Relation(rel.k, tuple(kept))
    if not abs(tan_psi) < 1:
        raise InvalidInput(f"tail tangent {tan_psi} has magnitude >= 1")
    new_terms = alferov_complete(AngleRemainder(tan_psi), cfg, trace)
    out = Relation(rel.k, tuple(kept + [Term(g * t.coeff, t.arg) for t in new_terms]))
    k, close = nearest_quarter_pi(out, WINDING_BITS)
    if k != rel.k or not close:
        raise AssertionError("extended relation lost its value")
    return out


def continued_fraction_starts(max_q0: int) -> list[tuple[int, int]]:
    """For each q0 in [2, max_q0] the m making m*acot(q0) closest to pi/4."""
    if max_q0 < 2:
        raise InvalidInput("max_q0 must be >= 2")
    bits = WINDING_BITS
    quarter = pi_fixed(bits) >> 2
    out = []
    for q0 in range(2, max_q0 + 1):
        a = atan_fixed(1, q0, bits)
        lo = quarter // a
        best = min((m for m in (lo, lo + 1) if m >= 1), key=lambda m: (abs(quarter - m * a), m))
        out.append((best, q0))
    return list(dict.fromkeys(out))


def sweep_truncations(rel: Relation, cfg: ExtendConfig | None = None) -> list[Relation]:
    """Truncate at every position and complete; failures are skipped."""
    out = []
    for keep in range(1, len(rel.terms)):
        try:
            out.append(truncate_and_extend(rel, keep, cfg))
        except (DigitCapExceeded, InvalidInput, PoleError):
            continue
    return out

"""Integer relation detection with PSLQ in fixed-point integer arithmetic.

Single-level PSLQ (Ferguson-Bailey) with gamma = sqrt(4/3).  Every real is
held as a Python int scaled by ``2**w`` with ``w = precision_bits + 64``;
the B matrix is kept as exact integers, so the run is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import InvalidInput
from .exact import Relation, Term

GUARD_BITS = 64


class PslqStatus(str, Enum):
    RELATION = "Relation"
    NO_RELATION = "NoRelationWithinBound"
    ITERATIONS = "IterationsExhausted"
    PRECISION = "PrecisionExhausted"


@dataclass
class PslqProblem:
    values: list
    precision_bits: int = 1024
    max_iterations: int | None = None
    coeff_bound: int = 128
    detection_threshold: object | None = None

    def __post_init__(self):
        if len(self.values) < 2:
            raise InvalidInput("PSLQ needs at least two values")
        if self.precision_bits < 128:
            raise InvalidInput("precision_bits must be >= 128")
        if self.max_iterations is None:
            self.max_iterations = default_max_iterations(len(self.values))
        if self.detection_threshold is None:
            self.detection_threshold = mpmath.ldexp(mpmath.mpf(1), -(self.precision_bits // 2))

    def threshold_bits(self) -> float:
        return float(-mpmath.log(mpmath.mpf(self.detection_threshold), 2))


@dataclass
class PslqOutcome:
    status: PslqStatus
    vector: list[int] | None = None
    residual: mpmath.mpf | None = None
    iterations: int = 0

    @property
    def found(self) -> bool:
        return self.status is PslqStatus.RELATION

    def to_json(self) -> dict:
        out = {"status": self.status.value, "iterations": self.iterations}
        if self.vector is not None:
            out["vector"] = [v if abs(v) < 2 ** 53 else str(v) for v in self.vector]
        if self.residual is not None:
            out["residual"] = mpmath.nstr(self.residual, 5)
        return out


def default_max_iterations(n: int, factor: float = 1.0) -> int:
    return max(1, int(10 * n ** 3 * factor))


def to_fixed(v, bits: int) -> int:
    """Round a real (int, Fraction, mpf, str) to the nearest multiple of 2**-bits."""
    if isinstance(v, int):
        return v << bits
    if isinstance(v, Fraction):
        return ((v.numerator << (bits + 1)) // v.denominator + 1) >> 1
    if isinstance(v, str):
        with mpmath.workprec(bits + 32):
            v = mpmath.mpf(v)
    if not isinstance(v, mpmath.mpf):
        # plain mpf() would round to the global context precision
        with mpmath.workprec(max(bits + 32, 64)):
            v = mpmath.mpf(v)
    if not v:
        return 0
    sign, man, exp, _ = v._mpf_
    # man_exp would drop the sign; man may be a gmpy2 mpz
    man = -int(man) if sign else int(man)
    shift = exp + bits
    if shift >= 0:
        return man << shift
    return ((man >> (-shift - 1)) + 1) >> 1


def pslq_find(problem: PslqProblem) -> PslqOutcome:
    """Search for an integer vector m with ``sum m_i * values_i == 0``."""
    prec = problem.precision_bits
    xs = [to_fixed(v, prec) for v in problem.values]
    if any(x == 0 for x in xs):
        raise InvalidInput("PSLQ input contains a zero value")
    thr = mpmath.mpf(problem.detection_threshold)
    threshold_fixed = max(1, int(mpmath.ldexp(thr, prec)))
    return pslq_fixed(xs, prec, coeff_bound=problem.coeff_bound,
                      threshold_fixed=threshold_fixed,
                      max_iterations=problem.max_iterations)


def pslq_fixed(xs: Sequence[int], prec: int, *, coeff_bound: int = 128,
               threshold_fixed: int | None = None,
               max_iterations: int | None = None) -> PslqOutcome:
    """PSLQ on values given as integers scaled by ``2**prec``.

    ``threshold_fixed`` is the detection threshold in the same scale
    (default ``2**(prec/2)``, i.e. a real threshold of ``2**-(prec/2)``).
    """
    n = len(xs)
    if n < 2:
        raise InvalidInput("PSLQ needs at least two values")
    if any(x == 0 for x in xs):
        raise InvalidInput("PSLQ input contains a zero value")
    if threshold_fixed is None:
        threshold_fixed = 1 << (prec - prec // 2)
    if max_iterations is None:
        max_iterations = default_max_iterations(n)
    g = GUARD_BITS
    w = prec + g
    one = 1 << w
    x = [v << g for v in xs]
    # y below threshold in the working scale
    tol = threshold_fixed << g
    # B entries beyond this make y noise comparable to the threshold
    b_limit_bits = max(8, prec - threshold_fixed.bit_length() - n.bit_length() - 4)
    bound_fixed = one >> coeff_bound if coeff_bound < w else 0

    # partial sums of squares, normalised so that |x| = 1
    s = [0] * n
    acc = 0
    for k in range(n - 1, -1, -1):
        acc += x[k] * x[k]
        s[k] = math.isqrt(acc)
    t = s[0]
    y = [(xk << w) // t for xk in x]
    s = [(sk << w) // t for sk in s]

    H = [[0] * (n - 1) for _ in range(n)]
    for i in range(n):
        if i < n - 1 and s[i]:
            H[i][i] = (s[i + 1] << w) // s[i]
        for j in range(min(i, n - 1)):
            d = s[j] * s[j + 1] >> w
            if d:
                H[i][j] = -((y[i] * y[j] >> w) << w) // d
    B = [[int(i == j) for j in range(n)] for i in range(n)]

    def reduce_row(i: int, jmax: int) -> None:
        Hi = H[i]
        for j in range(jmax, -1, -1):
            hjj = H[j][j]
            if not hjj:
                continue
            q = Hi[j]
            # nearest integer to q / hjj
            tq = (2 * q + hjj) // (2 * hjj) if hjj > 0 else (2 * q + hjj) // (2 * hjj)
            if not tq:
                continue
            y[j] += tq * y[i]
            Hj = H[j]
            for k in range(j + 1):
                Hi[k] -= tq * Hj[k]
            for row in B:
                row[j] += tq * row[i]

    for i in range(1, n):
        reduce_row(i, i - 1)

    gamma = math.isqrt((4 << (2 * w)) // 3)
    gpow = [gamma]
    for _ in range(n - 2):
        gpow.append(gpow[-1] * gamma >> w)

    def check_y(iteration: int) -> PslqOutcome | None:
        best = None
        for i in range(n):
            ay = abs(y[i])
            if ay < tol and (best is None or ay < abs(y[best])):
                best = i
        if best is None:
            return None
        vec = [B[j][best] for j in range(n)]
        if not any(vec):
            return None
        g0 = 0
        for v in vec:
            g0 = math.gcd(g0, v)
        vec = [v // g0 for v in vec]
        first = next(v for v in vec if v)
        if first < 0:
            vec = [-v for v in vec]
        resid = abs(sum(v * xv for v, xv in zip(vec, xs)))
        residual = mpmath.mp.make_mpf(mpmath.libmp.from_man_exp(resid, -prec))
        if max(abs(v) for v in vec).bit_length() > coeff_bound:
            return PslqOutcome(PslqStatus.NO_RELATION, None, residual, iteration)
        if resid >= threshold_fixed:
            return PslqOutcome(PslqStatus.PRECISION, None, residual, iteration)
        return PslqOutcome(PslqStatus.RELATION, vec, residual, iteration)

    found = check_y(0)
    if found:
        return found

    for it in range(1, max_iterations + 1):
        # pick m maximising gamma^(m+1) |H_mm|
        m = 0
        best = -1
        for i in range(n - 1):
            v = gpow[i] * abs(H[i][i])
            if v > best:
                best = v
                m = i
        y[m], y[m + 1] = y[m + 1], y[m]
        H[m], H[m + 1] = H[m + 1], H[m]
        for row in B:
            row[m], row[m + 1] = row[m + 1], row[m]
        if m < n - 2:
            a = H[m][m]
            b = H[m][m + 1]
            t0 = math.isqrt(a * a + b * b)
            if t0:
                t1 = (a << w) // t0
                t2 = (b << w) // t0
                for i in range(m, n):
                    t3 = H[i][m]
                    t4 = H[i][m + 1]
                    H[i][m] = (t1 * t3 + t2 * t4) >> w
                    H[i][m + 1] = (t1 * t4 - t2 * t3) >> w
        for i in range(m + 1, n):
            reduce_row(i, min(i - 1, m + 1))

        found = check_y(it)
        if found:
            return found

        maxh = max(abs(H[j][j]) for j in range(n - 1))
        if maxh == 0 or maxh < bound_fixed:
            # every relation has norm >= 1/max|H_jj| > 2^coeff_bound
            return PslqOutcome(PslqStatus.NO_RELATION, None, None, it)
        bmax = max(abs(v) for row in B for v in row)
        if bmax.bit_length() > b_limit_bits:
            return PslqOutcome(PslqStatus.PRECISION, None, None, it)
    return PslqOutcome(PslqStatus.ITERATIONS, None, None, max_iterations)


# ---------------------------
# Mapping PSLQ vectors to relations
# ---------------------------

PI = "pi"


def classify_vector(vector: Sequence[int], inputs: Sequence) -> Relation:
    """Turn ``m0*pi + sum m_i*arctan(arg_i) = 0`` into a canonical relation.

    ``inputs[0]`` is ``"pi"``; the rest are Terms or rational arguments.
    """
    if len(vector) != len(inputs):
        raise InvalidInput("vector and inputs differ in length")
    if inputs[0] != PI:
        raise InvalidInput("slot 0 must hold pi")
    terms = []
    for m, inp in zip(vector[1:], inputs[1:]):
        if m == 0:
            continue
        arg = inp.arg if isinstance(inp, Term) else Fraction(inp)
        terms.append(Term(int(m), arg))
    return Relation(-4 * int(vector[0]), tuple(terms)).canonical()

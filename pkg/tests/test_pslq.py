from __future__ import annotations

import math
import random
from fractions import Fraction

import mpmath
import pytest

from machinlike.errors import InvalidInput
from machinlike.exact import Relation, Term, verify_exact
from machinlike.numeric import arctan_real, pi_real
from machinlike.pslq import PI, PslqProblem, PslqStatus, classify_vector, pslq_find, to_fixed


def atans(*xs, bits=1100):
    return [arctan_real(Fraction(1, x), bits) for x in xs]


def proportional(u, v):
    return len(u) == len(v) and all(a * v[0] == b * u[0] for a, b in zip(u, v))


# ---------------------------
# Fixed examples
# ---------------------------

def test_exact_thirds():
    out = pslq_find(PslqProblem([Fraction(1), Fraction(1, 3)], 256))
    assert out.status is PslqStatus.RELATION
    assert out.vector in ([1, -3], [-1, 3])


def test_machin_vector():
    out = pslq_find(PslqProblem([pi_real(1100)] + atans(5, 239), 1024))
    assert out.found and out.vector == [1, -16, 4]
    with mpmath.workprec(1200):
        assert abs(pi_real(1100) - 16 * atans(5)[0] + 4 * atans(239)[0]) < mpmath.mpf(2) ** -900


def test_zero_relation_vector():
    out = pslq_find(PslqProblem(atans(2, 3, 7, bits=600), 512))
    assert out.found and proportional(out.vector, [1, -1, -1])


def test_mpmath_inputs_keep_their_precision():
    with mpmath.workprec(700):
        vals = [mpmath.pi, mpmath.atan(mpmath.mpf(1) / 5), mpmath.atan(mpmath.mpf(1) / 239)]
    assert pslq_find(PslqProblem(vals, 512)).vector == [1, -16, 4]


def test_decimal_strings():
    out = pslq_find(PslqProblem(["1.5", "0.5"], 128))
    assert out.found and proportional(out.vector, [1, -3])


def test_input_validation():
    with pytest.raises(InvalidInput):
        PslqProblem([1], 256)
    with pytest.raises(InvalidInput):
        PslqProblem([1, 2], 64)
    with pytest.raises(InvalidInput):
        pslq_find(PslqProblem([Fraction(0), Fraction(1)], 256))


def test_no_relation_is_reported():
    with mpmath.workprec(600):
        vals = [mpmath.sqrt(p) for p in (2, 3, 5, 7, 11, 13)]
    out = pslq_find(PslqProblem(vals, 512, coeff_bound=32))
    assert not out.found and out.vector is None
    assert out.status in (PslqStatus.NO_RELATION, PslqStatus.PRECISION)


def test_low_precision_input_is_not_trusted():
    # double-precision pi cannot support a relation with 1024-bit confidence
    vals = [mpmath.mpf(math.pi), mpmath.mpf(math.atan(0.2)), mpmath.mpf(math.atan(1 / 239))]
    out = pslq_find(PslqProblem(vals, 256))
    if out.found:
        assert out.vector != [1, -16, 4]


def test_iteration_cap():
    with mpmath.workprec(600):
        vals = [mpmath.sqrt(p) for p in (2, 3, 5, 7, 11, 13, 17, 19)]
    out = pslq_find(PslqProblem(vals, 512, max_iterations=3))
    assert out.status is PslqStatus.ITERATIONS and out.iterations == 3


def test_to_fixed_rounding():
    assert to_fixed(Fraction(1, 3), 4) == 5
    assert to_fixed(3, 10) == 3 << 10
    assert to_fixed(mpmath.mpf("0.75"), 2) == 3
    assert to_fixed(mpmath.mpf("-0.75"), 4) == -12
    assert to_fixed("-2.5", 1) == -5


# ---------------------------
# Properties
# ---------------------------

def _planted(rng: random.Random, bits: int):
    n = rng.randint(3, 6)
    while True:
        m = [rng.randint(-40, 40) for _ in range(n)]
        if m[-1] != 0 and any(m[:-1]):
            break
    g = math.gcd(*m)
    m = [v // g for v in m]
    with mpmath.workprec(bits + 128):
        ys = [mpmath.mpf(rng.getrandbits(bits + 64)) / mpmath.mpf(2) ** (bits + 64) + rng.randint(0, 3)
              for _ in range(n - 1)]
        ys.append(-mpmath.fsum(mi * yi for mi, yi in zip(m, ys)) / m[-1])
    return m, ys


def test_planted_recovery_rate():
    rng = random.Random(1729)
    hits = 0
    for _ in range(200):
        m, ys = _planted(rng, 512)
        if any(y == 0 for y in ys):
            continue
        out = pslq_find(PslqProblem(ys, 384, coeff_bound=32))
        if out.found and proportional(out.vector, m):
            hits += 1
    assert hits >= 190


def test_residual_contract_and_determinism():
    rng = random.Random(7)
    for _ in range(20):
        m, ys = _planted(rng, 512)
        problem = PslqProblem(ys, 384, coeff_bound=32)
        a, b = pslq_find(problem), pslq_find(problem)
        assert a == b
        if a.found:
            with mpmath.workprec(600):
                resid = abs(mpmath.fsum(v * y for v, y in zip(a.vector, ys)))
            assert resid < problem.detection_threshold
            assert max(abs(v) for v in a.vector) < 2 ** 32


def test_hits_on_arctan_inputs_certify():
    # every relation found among small acot values must pass the exact check
    xs = [2, 3, 5, 7, 8, 18, 57, 239]
    pi = pi_real(600)
    rng = random.Random(3)
    hits = 0
    for _ in range(60):
        sub = sorted(rng.sample(xs, rng.randint(2, 4)))
        out = pslq_find(PslqProblem([pi] + atans(*sub, bits=600), 512, coeff_bound=32))
        if out.found:
            rel = classify_vector(out.vector, [PI] + [Fraction(1, x) for x in sub])
            assert verify_exact(rel).valid
            hits += 1
    assert hits > 0


# ---------------------------
# classify_vector
# ---------------------------

@pytest.mark.parametrize("vector,xs,expected", [
    ([1, -16, 4], [5, 239], Relation.acot(1, [(4, 5), (-1, 239)])),
    ([0, 1, -1, -1], [2, 3, 7], Relation.acot(0, [(1, 2), (-1, 3), (-1, 7)])),
    ([1, -4, -4], [2, 3], Relation.acot(1, [(1, 2), (1, 3)])),
    ([-1, 16, -4], [5, 239], Relation.acot(1, [(4, 5), (-1, 239)])),
])
def test_classify_vector(vector, xs, expected):
    rel = classify_vector(vector, [PI] + [Fraction(1, x) for x in xs])
    assert rel == expected
    assert verify_exact(rel).valid


def test_classify_vector_accepts_terms():
    rel = classify_vector([1, -16, 4], [PI, Term.acot(1, 5), Term.acot(1, 239)])
    assert rel.k == 1

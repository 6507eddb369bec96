from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from machinlike.numeric import ULP_ERROR, arctan_real, atan_fixed, pi_fixed, pi_real, sum_fixed


def exact_scaled(value_fn, bits: int):
    """mpmath reference for 2**bits * value, computed with 64 spare bits."""
    with mpmath.workprec(bits + 64):
        return mpmath.ldexp(value_fn(), bits)


@pytest.mark.parametrize("bits", [64, 128, 500, 1024, 3000])
def test_pi_fixed_error_bound(bits):
    ref = exact_scaled(lambda: mpmath.pi, bits)
    with mpmath.workprec(bits + 64):
        assert abs(pi_fixed(bits) - ref) < ULP_ERROR


@settings(max_examples=300, deadline=None)
@given(st.integers(-10**12, 10**12), st.integers(1, 10**12), st.sampled_from([64, 200, 1024]))
def test_atan_fixed_error_bound(p, q, bits):
    ref = exact_scaled(lambda: mpmath.atan(mpmath.mpf(p) / q), bits)
    with mpmath.workprec(bits + 64):
        assert abs(atan_fixed(p, q, bits) - ref) < ULP_ERROR


def test_atan_fixed_sign_and_zero():
    assert atan_fixed(0, 7, 100) == 0
    assert atan_fixed(-3, 7, 100) == -atan_fixed(3, 7, 100)
    assert atan_fixed(3, -7, 100) == -atan_fixed(3, 7, 100)
    with pytest.raises(ZeroDivisionError):
        atan_fixed(1, 0, 64)


def test_real_wrappers_keep_precision():
    v = arctan_real(Fraction(1, 5), 2000)
    with mpmath.workprec(2100):
        assert abs(v - mpmath.atan(mpmath.mpf(1) / 5)) < mpmath.mpf(2) ** -1990
        assert abs(pi_real(2000) - mpmath.pi) < mpmath.mpf(2) ** -1990


def test_sum_fixed_bound():
    pairs = [(183, Fraction(1, 239)), (32, Fraction(1, 1023)), (-68, Fraction(1, 5832)),
             (12, Fraction(1, 110443)), (-12, Fraction(1, 4841182)), (-100, Fraction(1, 6826318))]
    s, w = sum_fixed(pairs, 900)
    with mpmath.workprec(1100):
        assert abs(mpmath.ldexp(s, -w) - mpmath.pi / 4) < mpmath.mpf(2) ** -900

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markov_dyck.series import FormalPowerSeries as FPS
from markov_dyck.series import product

coeffs = st.lists(st.integers(-20, 20), min_size=1, max_size=8)


def test_geometric_reciprocal():
    assert (FPS.one(5) - FPS([0, 1], 5)).reciprocal() == FPS([1] * 6, 5)


def test_exp_of_z():
    assert FPS([0, 1], 4).exp() == FPS([1, 1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24)], 4)


def test_exp_requires_zero_constant():
    with pytest.raises(ValueError):
        FPS([1, 1], 3).exp()


def test_truncation_mismatch():
    with pytest.raises(ValueError):
        FPS([1], 3) + FPS([1], 4)


def test_integral_coeffs():
    assert FPS([1, 2], 3).int_coeffs() == [1, 2, 0, 0]
    with pytest.raises(ValueError):
        FPS([Fraction(1, 2)], 0).int_coeffs()


def test_product_of_nothing_is_one():
    assert product([], 3) == FPS.one(3)


@given(coeffs)
@settings(max_examples=100)
def test_log_exp_inverse(cs):
    s = FPS([0] + cs, 8)
    assert s.exp().log() == s


@given(coeffs, coeffs)
@settings(max_examples=100)
def test_exp_is_multiplicative(a, b):
    x, y = FPS([0] + a, 7), FPS([0] + b, 7)
    assert (x + y).exp() == x.exp() * y.exp()


@given(coeffs)
@settings(max_examples=100)
def test_reciprocal(cs):
    s = FPS([1] + cs, 7)
    assert s * s.reciprocal() == FPS.one(7)

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate
from scipy.special import eval_hermite

from ramanent.exact_core import Surd, binomial, falling_factorial, hermite, hermite_gaussian, hermite_gaussian_table


def test_pascal_identity():
    for n in range(1, 51):
        for k in range(1, n + 1):
            assert binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k)


def test_falling_factorial_vs_binomial():
    for n in range(51):
        for h in range(n + 1):
            assert falling_factorial(n, h) == binomial(n, h) * math.factorial(h)


def test_out_of_range_is_zero():
    assert binomial(3, 4) == 0
    assert binomial(3, -1) == 0
    assert falling_factorial(2, 3) == 0
    with pytest.raises(ValueError):
        binomial(-1, 0)


EXPLICIT = [
    lambda x: 1 + 0 * x,
    lambda x: 2 * x,
    lambda x: 4 * x**2 - 2,
    lambda x: 8 * x**3 - 12 * x,
    lambda x: 16 * x**4 - 48 * x**2 + 12,
    lambda x: 32 * x**5 - 160 * x**3 + 120 * x,
    lambda x: 64 * x**6 - 480 * x**4 + 720 * x**2 - 120,
]


def test_hermite_explicit():
    x = np.random.default_rng(3).uniform(-4, 4, 100)
    for k, poly in enumerate(EXPLICIT):
        ref = poly(x)
        np.testing.assert_allclose(hermite(k, x), ref, rtol=1e-9, atol=1e-9 * np.abs(ref).max())


@given(st.integers(0, 30), st.floats(-6, 6))
def test_hermite_matches_scipy(k, x):
    ref = eval_hermite(k, x)
    assert hermite(k, x) == pytest.approx(ref, rel=1e-9, abs=1e-9)


def test_orthonormality():
    for a in range(21):
        for b in range(a, 21):
            val, _ = integrate.quad(lambda x: hermite_gaussian(a, x) * hermite_gaussian(b, x),
                                    -np.inf, np.inf, epsabs=1e-12, limit=400)
            assert val == pytest.approx(float(a == b), abs=1e-8)


def test_hermite_gaussian_stable_high_order():
    x = np.linspace(-25, 25, 2001)
    table = hermite_gaussian_table(200, x)
    assert np.all(np.isfinite(table))
    dx = x[1] - x[0]
    assert np.sum(table[200] ** 2) * dx == pytest.approx(1.0, abs=1e-6)


def test_surd_arithmetic():
    r2 = Surd(Fraction(1), Fraction(2))
    assert r2 * r2 == Surd(Fraction(2))
    assert (r2 * r2).is_rational
    assert Surd(Fraction(3), Fraction(4)).to_fraction() == 6
    assert (r2 + r2) == Surd(Fraction(2), Fraction(2))
    assert (Surd(Fraction(1), Fraction(8)) - r2) == r2
    assert float(Surd(Fraction(-1), Fraction(3))) == pytest.approx(-math.sqrt(3))
    assert Surd(Fraction(-2), Fraction(5)).sign() == -1


@given(st.fractions(min_value=-10, max_value=10, max_denominator=50),
       st.fractions(min_value=0, max_value=10, max_denominator=50))
def test_surd_square_roundtrip(c, r):
    s = Surd(c, r)
    assert s.square() == c * c * r
    assert float(s) == pytest.approx(float(c) * math.sqrt(float(r)), abs=1e-12)

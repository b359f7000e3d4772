"""Exact combinatorics, a surd scalar type, and Hermite special functions.

Everything integer- or rational-valued is returned as ``int`` or
``fractions.Fraction`` so downstream moment formulas stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath
import numpy as np

ExactScalar = Fraction


def binomial(n: int, k: int) -> int:
    """C(n, k), zero outside 0 <= k <= n."""
    if n < 0:
        raise ValueError(f"binomial needs n >= 0, got {n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def falling_factorial(n: int, h: int) -> int:
    """n (n-1) ... (n-h+1); zero when h > n."""
    if n < 0 or h < 0:
        raise ValueError(f"falling_factorial needs n, h >= 0, got {n}, {h}")
    if h > n:
        return 0
    return math.perm(n, h)


def hermite(k: int, x):
    """Physicists' Hermite polynomial H_k(x) by the three-term recurrence.

    Works elementwise on numpy arrays.
    """
    if k < 0:
        raise ValueError("hermite order must be >= 0")
    x = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
    h_prev = np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
    if k == 0:
        return h_prev
    h = 2.0 * x
    for j in range(1, k):
        h_prev, h = h, 2.0 * x * h - 2.0 * j * h_prev
    return h


def hermite_gaussian(n: int, x):
    """Normalized oscillator eigenfunction phi_n(x) = (2^n n! sqrt(pi))^-1/2 H_n(x) exp(-x^2/2).

    Uses the normalized recurrence so that n in the hundreds does not overflow.
    """
    if n < 0:
        raise ValueError("hermite_gaussian order must be >= 0")
    x_arr = np.asarray(x, dtype=float)
    prev = np.zeros_like(x_arr)
    cur = np.pi ** -0.25 * np.exp(-0.5 * x_arr * x_arr)
    for j in range(n):
        prev, cur = cur, np.sqrt(2.0 / (j + 1)) * x_arr * cur - np.sqrt(j / (j + 1)) * prev
    return cur if x_arr.ndim else float(cur)


def hermite_gaussian_table(n_max: int, x) -> np.ndarray:
    """All phi_0..phi_{n_max} at the points x, shape (n_max + 1, len(x))."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((n_max + 1, x_arr.size))
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x_arr * x_arr)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * x_arr * out[0]
    for j in range(1, n_max):
        out[j + 1] = np.sqrt(2.0 / (j + 1)) * x_arr * out[j] - np.sqrt(j / (j + 1)) * out[j - 1]
    return out


def _is_square(q: Fraction) -> bool:
    if q < 0:
        return False
    num, den = q.numerator, q.denominator
    return math.isqrt(num) ** 2 == num and math.isqrt(den) ** 2 == den


def _exact_sqrt(q: Fraction) -> Fraction:
    return Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator))


@dataclass(frozen=True)
class Surd:
    """Exact real number ``coeff * sqrt(radicand)`` with rational parts.

    Products are always exact; sums are exact when the radicands differ by a
    rational square, which covers every sum this package needs.
    """

    coeff: Fraction
    radicand: Fraction = Fraction(1)

    def __post_init__(self):
        coeff = Fraction(self.coeff)
        rad = Fraction(self.radicand)
        if rad < 0:
            raise ValueError("negative radicand")
        if coeff == 0 or rad == 0:
            coeff, rad = Fraction(0), Fraction(1)
        elif rad != 1 and _is_square(rad):
            coeff, rad = coeff * _exact_sqrt(rad), Fraction(1)
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "radicand", rad)

    @classmethod
    def of(cls, value) -> "Surd":
        if isinstance(value, Surd):
            return value
        if isinstance(value, (int, Rational)):
            return cls(Fraction(value))
        raise TypeError(f"cannot make an exact Surd from {type(value).__name__}")

    def square(self) -> Fraction:
        return self.coeff * self.coeff * self.radicand

    def sign(self) -> int:
        return (self.coeff > 0) - (self.coeff < 0)

    def is_rational(self) -> bool:
        return self.radicand == 1

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is irrational")
        return self.coeff

    def __mul__(self, other):
        try:
            other = Surd.of(other)
        except TypeError:
            return NotImplemented
        return Surd(self.coeff * other.coeff, self.radicand * other.radicand)

    __rmul__ = __mul__

    def __neg__(self):
        return Surd(-self.coeff, self.radicand)

    def __add__(self, other):
        try:
            other = Surd.of(other)
        except TypeError:
            return NotImplemented
        if other.coeff == 0:
            return self
        if self.coeff == 0:
            return other
        ratio = other.radicand / self.radicand
        if not _is_square(ratio):
            raise ValueError("sum of incommensurable surds is not representable")
        return Surd(self.coeff + other.coeff * _exact_sqrt(ratio), self.radicand)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-Surd.of(other))

    def __eq__(self, other):
        try:
            other = Surd.of(other)
        except TypeError:
            return NotImplemented
        return self.sign() == other.sign() and self.square() == other.square()

    def __hash__(self):
        return hash((self.sign(), self.square()))

    def __float__(self) -> float:
        if self.coeff == 0:
            return 0.0
        with mpmath.workdps(30):
            rad = mpmath.sqrt(mpmath.mpf(self.radicand.numerator) / self.radicand.denominator)
            val = mpmath.mpf(self.coeff.numerator) / self.coeff.denominator * rad
            return float(val)

    def __repr__(self) -> str:
        if self.radicand == 1:
            return f"Surd({self.coeff})"
        return f"Surd({self.coeff}*sqrt({self.radicand}))"

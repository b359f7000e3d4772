"""Two-mode squeezed amplitudes, 50:50 beam-splitter Fock coefficients and the
conditioned joint anti-Stokes state."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exact_core import Surd, binomial


@dataclass(frozen=True)
class SqueezingParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("squeezing parameters must be nonnegative")

    @classmethod
    def equal(cls, alpha: float) -> "SqueezingParams":
        return cls(alpha, alpha)

    # derived quantities for the Gaussian-conditioned state
    @property
    def mu(self) -> float:
        return math.cosh(self.alpha)

    @property
    def nu(self) -> float:
        return math.sinh(self.alpha)

    @property
    def s(self) -> float:
        return self.mu ** 2 + self.nu ** 2


@dataclass(frozen=True)
class DetectionRecord:
    """Stokes photoelectron counts at detectors C (n) and D (m)."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError(f"detection counts must be >= 0, got ({self.n}, {self.m})")

    @property
    def total(self) -> int:
        return self.n + self.m


@dataclass(frozen=True)
class JointFockState:
    """Amplitudes over |i>_A |total - i>_B; exact Surds when built exactly."""

    total: int
    amplitudes: tuple

    def __post_init__(self):
        if len(self.amplitudes) != self.total + 1:
            raise ValueError("need total + 1 amplitudes")

    def as_array(self) -> np.ndarray:
        return np.array([float(a) for a in self.amplitudes])

    def norm_squared(self):
        if all(isinstance(a, Surd) for a in self.amplitudes):
            return sum((a.square() for a in self.amplitudes), Fraction(0))
        return float(np.sum(self.as_array() ** 2))


def squeezed_amplitude(params: SqueezingParams, cell: str, i: int) -> float:
    """C_i = tanh(a)^i / cosh(a) for the chosen cell ('A' or 'B')."""
    if i < 0:
        raise ValueError("photon number must be >= 0")
    a = {"A": params.alpha, "B": params.beta}[cell]
    return math.tanh(a) ** i / math.cosh(a)


@lru_cache(maxsize=200_000)
def bs_coefficient(n: int, m: int, i: int) -> Surd:
    """Beam-splitter Fock coefficient B_i^{n,m} as an exact Surd.

    Connects the pair (n, m) with (i, n + m - i); the alternating sum is done
    in integers so zeros and signs are exact.
    """
    if n < 0 or m < 0:
        raise ValueError("photon numbers must be >= 0")
    total = n + m
    if i < 0 or i > total:
        raise ValueError(f"output index {i} outside 0..{total}")
    acc = 0
    for k in range(max(0, i - m), min(i, n) + 1):
        term = binomial(n, k) * binomial(m, i - k)
        acc += -term if (i - k) % 2 else term
    radicand = Fraction(math.factorial(i) * math.factorial(total - i),
                        math.factorial(n) * math.factorial(m) * 2 ** total)
    return Surd(Fraction(acc), radicand)


def _fix_sign(amps):
    for a in amps:
        sgn = a.sign() if isinstance(a, Surd) else np.sign(a)
        if sgn != 0:
            return tuple(-x for x in amps) if sgn < 0 else tuple(amps)
    return tuple(amps)


def conditioned_state(rec: DetectionRecord) -> JointFockState:
    """Anti-Stokes state given ideal Stokes counts, equal squeezing in both cells.

    amplitudes[i] = B_n^{i, N-i}; the first nonzero amplitude is made positive.
    """
    total = rec.total
    amps = [bs_coefficient(i, total - i, rec.n) for i in range(total + 1)]
    return JointFockState(total, _fix_sign(amps))


def unnormalized_state(params: SqueezingParams, rec: DetectionRecord) -> np.ndarray:
    """Squeezing-weighted amplitudes before normalization; allows alpha != beta."""
    total = rec.total
    ta, tb = math.tanh(params.alpha), math.tanh(params.beta)
    pref = 1.0 / (math.cosh(params.alpha) * math.cosh(params.beta))
    return np.array([
        pref * ta ** i * tb ** (total - i) * float(bs_coefficient(i, total - i, rec.n))
        for i in range(total + 1)
    ])


def normalized_state(params: SqueezingParams, rec: DetectionRecord) -> JointFockState:
    vec = unnormalized_state(params, rec)
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValueError("state vanishes for these parameters")
    return JointFockState(rec.total, _fix_sign(list(vec / norm)))


def marginal_distribution(state: JointFockState) -> np.ndarray:
    """Photon-number distribution of mode A: p_i = amplitudes[i]^2."""
    if all(isinstance(a, Surd) for a in state.amplitudes):
        return np.array([float(a.square()) for a in state.amplitudes])
    return state.as_array() ** 2


def marginal_distribution_exact(state: JointFockState) -> list[Fraction]:
    return [a.square() for a in state.amplitudes]


def geometric_probability(alpha: float, k: int) -> float:
    """Single-cell Stokes photon-number law sech^2(a) tanh^(2k)(a)."""
    return math.tanh(alpha) ** (2 * k) / math.cosh(alpha) ** 2


def stokes_joint_probability(params: SqueezingParams, rec: DetectionRecord) -> float:
    """Probability of the ideal count pair (n, m) behind the beam splitter.

    Two identical thermal inputs stay a product of the same thermal laws.
    """
    if not math.isclose(params.alpha, params.beta):
        raise ValueError("joint Stokes probability is implemented for alpha == beta")
    return geometric_probability(params.alpha, rec.n) * geometric_probability(params.alpha, rec.m)

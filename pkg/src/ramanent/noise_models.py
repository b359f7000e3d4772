"""Noise models: Stokes detector posteriors and anti-Stokes readout loss."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import mpmath
import numpy as np
from scipy.special import erfcinv

from .exact_core import binomial
from .fock_states import DetectionRecord, bs_coefficient, conditioned_state

DEFAULT_TAIL_EPS = 1e-12
# working precision for posterior-averaged moments; entries cancel by up to ~n^6
WORK_DPS = 60


@dataclass(frozen=True)
class Ideal:
    def label(self) -> str:
        return "ideal"


@dataclass(frozen=True)
class DetectorEfficiency:
    eta_C: float
    eta_D: float

    def __post_init__(self):
        for eta in (self.eta_C, self.eta_D):
            if not 0 < eta <= 1:
                raise ValueError(f"detector efficiency must lie in (0, 1], got {eta}")

    def label(self) -> str:
        return f"eff:{self.eta_C:g},{self.eta_D:g}"


@dataclass(frozen=True)
class DetectorGaussian:
    sigma_C: float
    sigma_D: float

    def __post_init__(self):
        for sigma in (self.sigma_C, self.sigma_D):
            if not sigma > 0:
                raise ValueError(f"noise sigma must be > 0, got {sigma}")

    def label(self) -> str:
        return f"gauss:{self.sigma_C:g},{self.sigma_D:g}"


@dataclass(frozen=True)
class ReadoutLoss:
    eta_A: float
    eta_B: float

    def __post_init__(self):
        for eta in (self.eta_A, self.eta_B):
            if not 0 <= eta <= 1:
                raise ValueError(f"loss transmission must lie in [0, 1], got {eta}")

    def label(self) -> str:
        return f"loss:{self.eta_A:g},{self.eta_B:g}"


NoiseModel = Union[Ideal, DetectorEfficiency, DetectorGaussian, ReadoutLoss]
DetectorModel = Union[DetectorEfficiency, DetectorGaussian]


def parse_model(text: str) -> NoiseModel:
    """Parse 'ideal', 'eff:0.9,0.9', 'gauss:2,2' or 'loss:0.5,0.5'."""
    text = text.strip().lower()
    if text == "ideal":
        return Ideal()
    kind, _, rest = text.partition(":")
    try:
        a, b = (float(v) for v in rest.split(","))
    except ValueError:
        raise ValueError(f"cannot parse noise model {text!r}") from None
    builders = {"eff": DetectorEfficiency, "gauss": DetectorGaussian, "loss": ReadoutLoss}
    if kind not in builders:
        raise ValueError(f"unknown noise model kind {kind!r}")
    return builders[kind](a, b)


@dataclass(frozen=True)
class ConditionalDistribution:
    """p(i | n) on i = support_offset, support_offset + 1, ...

    Weights are high-precision mpf values; ``truncation_bound`` is the tail
    mass dropped before renormalizing.
    """

    support_offset: int
    weights: tuple
    truncation_bound: float

    @property
    def support(self) -> range:
        return range(self.support_offset, self.support_offset + len(self.weights))

    def probabilities(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])

    def mean(self) -> float:
        return float(mpmath.fsum(w * i for i, w in zip(self.support, self.weights)))

    def factorial_moments(self, h_max: int) -> list:
        """E[i (i-1) ... (i-h+1)] for h = 0..h_max, in working precision."""
        with mpmath.workdps(WORK_DPS):
            acc = [mpmath.mpf(0)] * (h_max + 1)
            for i, w in zip(self.support, self.weights):
                term = w
                for h in range(h_max + 1):
                    if h > i:
                        break
                    acc[h] += term
                    term *= i - h
            return acc


def efficiency_posterior(n: int, eta: float, tail_eps: float = DEFAULT_TAIL_EPS) -> ConditionalDistribution:
    """Negative-binomial photon-number posterior for an inefficient counter (uniform prior)."""
    if n < 0:
        raise ValueError("count must be >= 0")
    if not 0 < eta <= 1:
        raise ValueError(f"efficiency must lie in (0, 1], got {eta}")
    return _efficiency_posterior(n, float(eta), float(tail_eps))


@lru_cache(maxsize=4096)
def _efficiency_posterior(n: int, eta: float, tail_eps: float) -> ConditionalDistribution:
    with mpmath.workdps(WORK_DPS):
        if eta == 1:
            return ConditionalDistribution(n, (mpmath.mpf(1),), 0.0)
        e = mpmath.mpf(eta)
        q = 1 - e
        w = e ** (n + 1)
        weights, total, i = [], mpmath.mpf(0), n
        while True:
            weights.append(w)
            total += w
            tail = 1 - total
            if tail < tail_eps and i > n + 2:
                break
            w = w * (i + 1) / (i + 1 - n) * q
            i += 1
        return ConditionalDistribution(n, tuple(x / total for x in weights), float(tail))


def gaussian_posterior(n: int, sigma: float, tail_eps: float = DEFAULT_TAIL_EPS) -> ConditionalDistribution:
    """Discretized Gaussian posterior on integers i >= 0, centred at n, renormalized."""
    if n < 0:
        raise ValueError("count must be >= 0")
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    return _gaussian_posterior(n, float(sigma), float(tail_eps))


@lru_cache(maxsize=8192)
def _gaussian_posterior(n: int, sigma: float, tail_eps: float) -> ConditionalDistribution:
    # two-sided continuous tail beyond k sigma is erfc(k / sqrt 2)
    k = math.sqrt(2.0) * float(erfcinv(tail_eps))
    half = int(math.ceil(k * sigma)) + 1
    lo, hi = max(0, n - half), n + half
    with mpmath.workdps(WORK_DPS):
        s2 = 2 * mpmath.mpf(sigma) ** 2
        raw = [mpmath.exp(-mpmath.mpf(i - n) ** 2 / s2) for i in range(lo, hi + 1)]
        total = mpmath.fsum(raw)
        weights = tuple(x / total for x in raw)
    dropped = math.erfc((half + 0.5) / (math.sqrt(2.0) * sigma))
    return ConditionalDistribution(lo, weights, dropped)


def detector_posteriors(rec: DetectionRecord, model: DetectorModel, tail_eps: float = DEFAULT_TAIL_EPS):
    """(p_C(i|n), p_D(j|m)) for a detector noise model."""
    if isinstance(model, DetectorEfficiency):
        return (efficiency_posterior(rec.n, model.eta_C, tail_eps),
                efficiency_posterior(rec.m, model.eta_D, tail_eps))
    if isinstance(model, DetectorGaussian):
        return (gaussian_posterior(rec.n, model.sigma_C, tail_eps),
                gaussian_posterior(rec.m, model.sigma_D, tail_eps))
    raise TypeError(f"not a detector noise model: {model!r}")


def loss_amplitude(i: int, total: int, r: int, s: int, eta_A: float, eta_B: float) -> float:
    """Amplitude for i -> r photons surviving on A and total-i -> s on B."""
    j = total - i
    if not (0 <= r <= i and 0 <= s <= j):
        raise ValueError(f"need 0 <= r <= {i} and 0 <= s <= {j}")
    prob = (binomial(i, r) * eta_A ** r * (1 - eta_A) ** (i - r)
            * binomial(j, s) * eta_B ** s * (1 - eta_B) ** (j - s))
    return math.sqrt(prob)


def _binomial_pmf(trials: int, eta: float) -> np.ndarray:
    return np.array([binomial(trials, r) * eta ** r * (1 - eta) ** (trials - r)
                     for r in range(trials + 1)])


def lossy_joint_distribution(rec: DetectionRecord, eta_A: float, eta_B: float) -> np.ndarray:
    """Joint distribution P[r, s] of detected anti-Stokes counts after loss.

    Unobserved loss modes are traced out, so the populations mix incoherently.
    """
    total = rec.total
    pops = [float(a.square()) for a in conditioned_state(rec).amplitudes]
    out = np.zeros((total + 1, total + 1))
    for i, p in enumerate(pops):
        if p == 0:
            continue
        out[: i + 1, : total - i + 1] += p * np.outer(_binomial_pmf(i, eta_A), _binomial_pmf(total - i, eta_B))
    return out


def lossy_photoelectron_distribution(rec: DetectionRecord, eta_A: float, eta_B: float = None) -> np.ndarray:
    """Distribution of detected anti-Stokes counts r from cell A after loss."""
    if eta_B is None:
        eta_B = eta_A
    return lossy_joint_distribution(rec, eta_A, eta_B).sum(axis=1)


@lru_cache(maxsize=65536)
def _bs_marginal(i: int, j: int) -> np.ndarray:
    return np.array([float(bs_coefficient(i, j, r).square()) for r in range(i + j + 1)])


def mixed_marginal_vector(rec: DetectionRecord, model: DetectorModel,
                          tail_eps: float = DEFAULT_TAIL_EPS) -> np.ndarray:
    """Mode-A photon-number distribution for the posterior mixture, all r at once."""
    p_c, p_d = detector_posteriors(rec, model, tail_eps)
    wc, wd = p_c.probabilities(), p_d.probabilities()
    r_max = p_c.support[-1] + p_d.support[-1]
    out = np.zeros(r_max + 1)
    for i, a in zip(p_c.support, wc):
        for j, b in zip(p_d.support, wd):
            out[: i + j + 1] += a * b * _bs_marginal(i, j)
    return out


def mixed_marginal_distribution(rec: DetectionRecord, model: DetectorModel, r: int,
                                tail_eps: float = DEFAULT_TAIL_EPS) -> float:
    """p_r = sum_ij p_C(i|n) p_D(j|m) |B_r^{i,j}|^2."""
    if r < 0:
        raise ValueError("r must be >= 0")
    vec = mixed_marginal_vector(rec, model, tail_eps)
    return float(vec[r]) if r < vec.size else 0.0

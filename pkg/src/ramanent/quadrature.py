"""Quadrature-domain analysis: two-mode wavefunctions, Duan-type variance sums,
loss and electronic-noise corrections, and phase-randomized homodyne moments.

Convention: q = (a + a^+)/sqrt 2, [q, p] = i, vacuum variance 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .exact_core import binomial, hermite, hermite_gaussian, hermite_gaussian_table
from .fock_states import DetectionRecord, bs_coefficient

SAMPLER_CUTOFF = 100


@dataclass(frozen=True)
class QuadratureWavefunction:
    representation: str  # "q" or "p"
    evaluator: Callable
    analytic_tag: str

    def __call__(self, x_a, x_b):
        return self.evaluator(x_a, x_b)


@dataclass(frozen=True)
class DuanReport:
    var_q_sum: float
    var_p_diff: float
    total: float
    entangled_detected: bool


@dataclass(frozen=True)
class HomodyneSample:
    value: float
    phase: float


@dataclass(frozen=True)
class MomentEstimate:
    value: complex
    stderr_real: float
    stderr_imag: float
    count: int

    def within(self, target: complex, n_sigma: float = 3.0) -> bool:
        ok_re = abs(self.value.real - target.real) <= n_sigma * self.stderr_real + 1e-15
        ok_im = abs(self.value.imag - complex(target).imag) <= n_sigma * self.stderr_imag + 1e-15
        return ok_re and ok_im


def _report(var_q, var_p) -> DuanReport:
    total = var_q + var_p
    return DuanReport(var_q, var_p, total, total < 2)


# wavefunctions


def number_state_wavefunction(rec: DetectionRecord, representation: str = "q") -> QuadratureWavefunction:
    """phi_n((x_B + x_A)/sqrt2) phi_m((x_B - x_A)/sqrt2), same form in q and p."""
    n, m = rec.n, rec.m

    def psi(x_a, x_b):
        x_a, x_b = np.asarray(x_a, dtype=float), np.asarray(x_b, dtype=float)
        return hermite_gaussian(n, (x_b + x_a) / math.sqrt(2)) * hermite_gaussian(m, (x_b - x_a) / math.sqrt(2))

    return QuadratureWavefunction(representation, psi, "number-conditioned")


def number_state_fock_sum(rec: DetectionRecord) -> QuadratureWavefunction:
    """sum_i B_i^{n,m} phi_i(x_A) phi_{N-i}(x_B), the Fock expansion of the same state."""
    n, m = rec.n, rec.m
    total = n + m
    coeffs = [float(bs_coefficient(n, m, i)) for i in range(total + 1)]

    def psi(x_a, x_b):
        x_a, x_b = np.atleast_1d(np.asarray(x_a, dtype=float)), np.atleast_1d(np.asarray(x_b, dtype=float))
        ta = hermite_gaussian_table(total, x_a.ravel())
        tb = hermite_gaussian_table(total, x_b.ravel())
        out = sum(c * ta[i] * tb[total - i] for i, c in enumerate(coeffs) if c)
        return np.asarray(out).reshape(np.broadcast(x_a, x_b).shape)

    return QuadratureWavefunction("p", psi, "number-conditioned Fock sum")


def gaussian_state_wavefunction(alpha: float, P: float = 0.0, Q: float = 0.0) -> QuadratureWavefunction:
    """Unnormalized q-space wavefunction conditioned on homodyne outcomes P, Q.

    The Q term is kept real as written, so it shifts the mean of q_A + q_B;
    the P term is a phase.
    """
    mu, nu = math.cosh(alpha), math.sinh(alpha)
    s = mu * mu + nu * nu
    kp = 2 * math.sqrt(2) * mu * nu * P / s
    kq = 2 * mu * nu * math.sqrt(2) * Q

    def psi(q_a, q_b):
        q_a, q_b = np.asarray(q_a, dtype=float), np.asarray(q_b, dtype=float)
        w, d = q_a + q_b, q_a - q_b
        return np.exp(-s * w * w / 4 - d * d / (4 * s) + 1j * kp * d + kq * w)

    return QuadratureWavefunction("q", psi, "gaussian-conditioned")


# numerical quadrature


def gauss_hermite_2d(fn: Callable, center=(0.0, 0.0), axes=((1.0, 0.0), (0.0, 1.0)),
                     n_nodes: int = 40, tol: float = 1e-10, max_nodes: int = 160) -> float:
    """Integral of fn over the plane by tensor Gauss-Hermite rules of growing order.

    Points are q = center + u * axes[0] + v * axes[1]; fn is divided by the
    rule weight exp(-(u^2 + v^2)). The order doubles until two successive
    results agree within ``tol`` (relative to max(1, |result|)).
    """
    (a0, a1), (b0, b1) = axes
    jac = abs(a0 * b1 - a1 * b0)
    prev = None
    while True:
        x, w = np.polynomial.hermite.hermgauss(n_nodes)
        u, v = np.meshgrid(x, x, indexing="ij")
        qa = center[0] + a0 * u + b0 * v
        qb = center[1] + a1 * u + b1 * v
        weight = np.exp(np.log(np.outer(w, w)) + u * u + v * v) * jac
        val = float(np.real(np.sum(weight * fn(qa, qb))))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        if n_nodes >= max_nodes:
            return val
        prev = val
        n_nodes = min(2 * n_nodes, max_nodes)


def _variance_of(density: Callable, observable: Callable, **kw) -> float:
    norm = gauss_hermite_2d(density, **kw)
    mean = gauss_hermite_2d(lambda a, b: density(a, b) * observable(a, b), **kw) / norm
    second = gauss_hermite_2d(lambda a, b: density(a, b) * observable(a, b) ** 2, **kw) / norm
    return second - mean * mean


def number_state_variances_numeric(rec: DetectionRecord) -> tuple:
    """(Var(q_A + q_B), Var(p_B - p_A)) by 2-D quadrature over the wavefunctions."""
    psi = number_state_wavefunction(rec)
    dens = lambda a, b: np.abs(psi(a, b)) ** 2  # noqa: E731
    nodes = max(40, rec.n + rec.m + 4)
    var_q = _variance_of(dens, lambda a, b: a + b, n_nodes=nodes)
    var_p = _variance_of(dens, lambda a, b: b - a, n_nodes=nodes)
    return var_q, var_p


def number_state_duan(rec: DetectionRecord) -> DuanReport:
    return _report(2 * rec.n + 1, 2 * rec.m + 1)


def gaussian_state_duan(alpha: float, P: float = 0.0, Q: float = 0.0) -> DuanReport:
    """Variances are 1/s each with s = cosh^2 + sinh^2; P and Q only move means."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    s = math.cosh(alpha) ** 2 + math.sinh(alpha) ** 2
    return _report(1 / s, 1 / s)


def gaussian_state_moments_numeric(alpha: float, P: float = 0.0, Q: float = 0.0) -> dict:
    """Means and variances of q_A + q_B and p_B - p_A by 2-D quadrature.

    The p moments use (p_B - p_A) psi = -i (d_B - d_A) psi, differentiated
    analytically.
    """
    mu, nu = math.cosh(alpha), math.sinh(alpha)
    s = mu * mu + nu * nu
    kp = 2 * math.sqrt(2) * mu * nu * P / s
    kq = 2 * mu * nu * math.sqrt(2) * Q
    psi = gaussian_state_wavefunction(alpha, P, Q)
    # d/dq_B - d/dq_A acts only through d = q_A - q_B, as -2 d/dd
    def dpsi(a, b):
        d = a - b
        return -2 * (-d / (2 * s) + 1j * kp) * psi(a, b)

    # integrate along w = q_A + q_B and d = q_A - q_B at the Gaussian's own widths
    sw, sd = math.sqrt(1 / (2 * s)), math.sqrt(s / 2)
    kw = dict(axes=((sw, sw), (sd, -sd)), n_nodes=40)
    dens = lambda a, b: np.abs(psi(a, b)) ** 2  # noqa: E731
    norm = gauss_hermite_2d(dens, **kw)
    mean_q = gauss_hermite_2d(lambda a, b: dens(a, b) * (a + b), **kw) / norm
    var_q = gauss_hermite_2d(lambda a, b: dens(a, b) * (a + b) ** 2, **kw) / norm - mean_q ** 2
    # <p_B - p_A> = <psi| -i (d_B - d_A) psi>, <(p_B - p_A)^2> = ||(d_B - d_A) psi||^2
    mean_p = gauss_hermite_2d(lambda a, b: np.real(np.conj(psi(a, b)) * (-1j) * dpsi(a, b)), **kw) / norm
    second_p = gauss_hermite_2d(lambda a, b: np.abs(dpsi(a, b)) ** 2, **kw) / norm
    return {"mean_q_sum": mean_q, "var_q_sum": var_q, "mean_p_diff": mean_p,
            "var_p_diff": second_p - mean_p ** 2, "s": s}


def lossy_variance(var_ideal: float, eta: float) -> float:
    """Loss mixes in vacuum: eta * var + (1 - eta)."""
    if var_ideal < 0:
        raise ValueError("variance must be >= 0")
    if not 0 <= eta <= 1:
        raise ValueError("eta must lie in [0, 1]")
    return eta * var_ideal + (1 - eta)


def electronic_noise_efficiency(signal_coeff: float, sigma_e: float) -> float:
    """Loss-equivalent efficiency of additive electronic noise, a^2 / (a^2 + sigma^2)."""
    if signal_coeff <= 0:
        raise ValueError("signal coefficient must be > 0")
    if sigma_e < 0:
        raise ValueError("noise sigma must be >= 0")
    if sigma_e == 0:
        return 1.0
    a2, s2 = signal_coeff ** 2, sigma_e ** 2
    return a2 / (a2 + s2)


def clearance(signal_coeff: float, sigma_e: float) -> float:
    """Vacuum-to-electronic noise power ratio S."""
    return (signal_coeff ** 2 + sigma_e ** 2) / sigma_e ** 2


# homodyne sampling and moment estimation


def _sampling_grid(cutoff: int, points_per_unit: int = 200):
    half = math.sqrt(2 * cutoff + 1) + 9.0
    npts = int(2 * half * points_per_unit) + 1
    return np.linspace(-half, half, npts)


def homodyne_sample(coeffs: Sequence[complex], count: int, seed=None, chunk: int = 200_000,
                    as_arrays: bool = False):
    """Phase-randomized homodyne outcomes for the single-mode state sum_n c_n |n>.

    Phi is uniform on [0, 2pi); q is drawn from |sum_n c_n e^{i n Phi} phi_n(q)|^2
    by inverse CDF on a fine grid with linear interpolation inside each cell.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.size - 1 > SAMPLER_CUTOFF:
        raise ValueError(f"Fock cutoff {c.size - 1} exceeds {SAMPLER_CUTOFF}")
    if count <= 0:
        raise ValueError("count must be positive")
    c = c / np.linalg.norm(c)
    cutoff = c.size - 1
    grid = _sampling_grid(cutoff)
    phi = hermite_gaussian_table(cutoff, grid)
    # density(q, Phi) = sum_d Re[e^{i d Phi} A_d(q)], A_d = sum_n c_{n+d} conj(c_n) phi_{n+d} phi_n (x2 for d>0)
    dens_terms = []
    for d in range(cutoff + 1):
        a_d = sum(c[n + d] * np.conj(c[n]) * phi[n + d] * phi[n] for n in range(cutoff + 1 - d))
        if d:
            a_d = 2 * a_d
        if np.any(np.abs(a_d) > 0):
            dens_terms.append((d, np.asarray(a_d, dtype=complex)))
    dx = grid[1] - grid[0]
    # cumulative trapezoid of each harmonic
    cum = np.array([np.concatenate([[0], np.cumsum(0.5 * (a[1:] + a[:-1]) * dx)]) for _, a in dens_terms])
    orders = np.array([d for d, _ in dens_terms])

    rng = np.random.default_rng(seed)
    values = np.empty(count)
    phases = np.empty(count)
    done = 0
    while done < count:
        size = min(chunk, count - done)
        phase = rng.uniform(0.0, 2 * np.pi, size)
        u = rng.uniform(0.0, 1.0, size)
        rot = np.exp(1j * np.outer(phase, orders))
        target = u * np.real(rot @ cum[:, -1])
        # vectorized bisection for the first grid cell whose CDF reaches the target
        lo_i = np.zeros(size, dtype=np.int64)
        hi_i = np.full(size, grid.size - 1, dtype=np.int64)
        while np.any(hi_i - lo_i > 1):
            mid = (lo_i + hi_i) // 2
            below = np.real(np.einsum("sd,ds->s", rot, cum[:, mid])) < target
            lo_i = np.where(below, mid, lo_i)
            hi_i = np.where(below, hi_i, mid)
        lo = np.real(np.einsum("sd,ds->s", rot, cum[:, lo_i]))
        hi = np.real(np.einsum("sd,ds->s", rot, cum[:, hi_i]))
        frac = np.clip(np.where(hi > lo, (target - lo) / np.where(hi > lo, hi - lo, 1), 0.5), 0, 1)
        idx = hi_i
        values[done:done + size] = grid[idx - 1] + frac * dx
        phases[done:done + size] = phase
        done += size
    if as_arrays:
        return values, phases
    return [HomodyneSample(float(v), float(p)) for v, p in zip(values, phases)]


# normalization of the phase average: fixed so the (0, 0) moment is exactly 1
PHASE_MEASURE = math.pi


def richter_estimate(samples, k: int, l: int) -> MomentEstimate:
    """Estimate <a^+k a^l> from phase-randomized quadrature samples.

    Each sample contributes H_{k+l}(q) e^{i(k-l)Phi} scaled by
    [pi sqrt(2^{k+l}) C(k+l, k)]^-1 times the phase measure pi.
    """
    if isinstance(samples, tuple) and len(samples) == 2 and isinstance(samples[0], np.ndarray):
        q, phase = samples
    else:
        if len(samples) == 0:
            raise ValueError("no samples")
        q = np.array([s.value for s in samples])
        phase = np.array([s.phase for s in samples])
    if q.size == 0:
        raise ValueError("no samples")
    pref = PHASE_MEASURE / (math.pi * math.sqrt(2 ** (k + l)) * binomial(k + l, k))
    vals = pref * hermite(k + l, q) * np.exp(1j * (k - l) * phase)
    count = q.size
    se_re = float(np.std(vals.real, ddof=1) / math.sqrt(count)) if count > 1 else float("inf")
    se_im = float(np.std(vals.imag, ddof=1) / math.sqrt(count)) if count > 1 else float("inf")
    return MomentEstimate(complex(vals.mean()), se_re, se_im, count)


def fock_moment(coeffs: Sequence[complex], k: int, l: int) -> complex:
    """Exact <a^+k a^l> of sum_n c_n |n>."""
    c = np.asarray(coeffs, dtype=complex)
    c = c / np.linalg.norm(c)
    acc = 0j
    for n in range(c.size):
        if n - l < 0:
            continue
        m = n - l + k  # a^l |n> ~ |n-l>, then <m| a^+k needs m - k = n - l
        if m >= c.size:
            continue
        acc += np.conj(c[m]) * c[n] * math.sqrt(math.perm(n, l) * math.perm(m, k))
    return complex(acc)

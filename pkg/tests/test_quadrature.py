import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special, stats

from ramanent.fock_states import DetectionRecord
from ramanent.quadrature import (clearance, electronic_noise_efficiency, fock_moment, gaussian_state_duan,
                                 gaussian_state_moments_numeric, homodyne_sample, lossy_variance,
                                 number_state_duan, number_state_fock_sum, number_state_variances_numeric,
                                 number_state_wavefunction, richter_estimate)

X = np.linspace(-14, 14, 561)
DX = X[1] - X[0]


def fourier_2d(values, p):
    """(1/2pi) int int psi(qA, qB) exp(-i (pA qA + pB qB)) by the trapezoid rule."""
    kern = np.exp(-1j * np.outer(p, X)) * DX / math.sqrt(2 * math.pi)
    return kern @ values @ kern.T


@pytest.mark.parametrize("n,m", [(0, 0), (1, 0), (2, 1), (3, 3), (4, 2), (0, 4), (4, 4)])
def test_fourier_pair(n, m):
    rec = DetectionRecord(n, m)
    qa, qb = np.meshgrid(X, X, indexing="ij")
    psi_q = number_state_wavefunction(rec, "q")(qa, qb)
    p = np.linspace(-3, 3, 13)
    got = fourier_2d(psi_q, p)
    pa, pb = np.meshgrid(p, p, indexing="ij")
    ref = (-1j) ** (n + m) * number_state_wavefunction(rec, "p")(pa, pb)
    assert np.max(np.abs(got - ref)) < 1e-8


@given(st.integers(0, 5), st.integers(0, 5), st.floats(-3, 3), st.floats(-3, 3))
def test_fock_sum_matches_closed_form(n, m, xa, xb):
    rec = DetectionRecord(n, m)
    a = number_state_fock_sum(rec)(xa, xb)
    b = number_state_wavefunction(rec)(xa, xb)
    assert float(np.squeeze(a)) == pytest.approx(float(b), abs=1e-10)


def test_number_state_variances():
    for n in range(6):
        for m in range(6):
            rec = DetectionRecord(n, m)
            var_q, var_p = number_state_variances_numeric(rec)
            assert var_q == pytest.approx(2 * n + 1, abs=1e-8)
            assert var_p == pytest.approx(2 * m + 1, abs=1e-8)
            rep = number_state_duan(rec)
            assert rep.total == 2 * (n + m + 1)
            assert not rep.entangled_detected


@pytest.mark.parametrize("alpha", [0.25, 1.0, 2.0])
@pytest.mark.parametrize("P,Q", [(0.0, 0.0), (0.7, -0.4)])
def test_gaussian_state_variances(alpha, P, Q):
    s = math.cosh(alpha) ** 2 + math.sinh(alpha) ** 2
    mom = gaussian_state_moments_numeric(alpha, P, Q)
    assert mom["var_q_sum"] == pytest.approx(1 / s, abs=1e-8)
    assert mom["var_p_diff"] == pytest.approx(1 / s, abs=1e-8)
    rep = gaussian_state_duan(alpha, P, Q)
    assert rep.total == pytest.approx(2 / s, abs=1e-12)
    assert rep.entangled_detected


def test_gaussian_vacuum_limit():
    mom = gaussian_state_moments_numeric(1e-6)
    assert mom["var_q_sum"] + mom["var_p_diff"] == pytest.approx(2.0, abs=1e-8)
    with pytest.raises(ValueError):
        gaussian_state_duan(0.0)


def test_lossy_gaussian_total_stays_below_two():
    rep = gaussian_state_duan(1.0)
    total = lossy_variance(rep.var_q_sum, 0.51) + lossy_variance(rep.var_p_diff, 0.51)
    assert total < 2


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_lossy_variance_affine(v, w, eta):
    mid = lossy_variance((v + w) / 2, eta)
    assert mid == pytest.approx((lossy_variance(v, eta) + lossy_variance(w, eta)) / 2, abs=1e-12)
    assert 0 <= lossy_variance(v, eta) <= 1


def test_electronic_noise_relations():
    for a, sig in [(1.0, 0.1), (2.0, 1.0), (0.5, 0.5)]:
        eta = electronic_noise_efficiency(a, sig)
        assert eta == pytest.approx(1 - 1 / clearance(a, sig))
    assert electronic_noise_efficiency(1.0, 0.0) == 1.0
    with pytest.raises(ValueError):
        electronic_noise_efficiency(0.0, 1.0)


def fock1_cdf(q):
    return 0.5 * (1 + special.erf(q)) - q * np.exp(-q * q) / math.sqrt(math.pi)


def test_sampler_marginal_matches_fock1():
    q, _ = homodyne_sample([0, 1], 100_000, seed=7, as_arrays=True)
    assert stats.kstest(q, fock1_cdf).pvalue > 1e-3


def test_sampler_phase_uniform():
    _, phase = homodyne_sample([2 ** -0.5, 2 ** -0.5], 100_000, seed=3, as_arrays=True)
    counts, _ = np.histogram(phase, bins=32, range=(0, 2 * math.pi))
    assert stats.chisquare(counts).pvalue > 1e-3


def test_sampler_deterministic():
    a = homodyne_sample([0.6, 0.8j], 1000, seed=42, as_arrays=True)
    b = homodyne_sample([0.6, 0.8j], 1000, seed=42, as_arrays=True)
    np.testing.assert_array_equal(a[0], b[0])
    objs = homodyne_sample([1], 3, seed=1)
    assert len(objs) == 3 and objs[0].value == homodyne_sample([1], 3, seed=1)[0].value


def test_vacuum_variance():
    q, _ = homodyne_sample([1], 200_000, seed=2, as_arrays=True)
    assert np.var(q) == pytest.approx(0.5, abs=0.01)


def test_richter_bias_shrinks():
    coeffs = [0, 0, 1]
    small = richter_estimate(homodyne_sample(coeffs, 10_000, seed=9, as_arrays=True), 1, 1)
    large = richter_estimate(homodyne_sample(coeffs, 1_000_000, seed=9, as_arrays=True), 1, 1)
    assert large.stderr_real < small.stderr_real / 5
    assert abs(large.value - 2) < abs(small.value - 2) or abs(large.value - 2) < 3 * large.stderr_real
    assert large.within(2)


def test_richter_phase_sensitive_moment():
    coeffs = [0.6, 0.8 * np.exp(0.9j)]
    est = richter_estimate(homodyne_sample(coeffs, 400_000, seed=4, as_arrays=True), 0, 1)
    assert est.within(fock_moment(coeffs, 0, 1))


def test_fock_moment():
    assert fock_moment([0, 0, 1], 1, 1) == pytest.approx(2)
    assert fock_moment([0, 0, 1], 2, 2) == pytest.approx(2)
    assert fock_moment([1, 1], 0, 1) == pytest.approx(0.5)
    assert fock_moment([1, 1], 1, 0) == pytest.approx(0.5)


def test_richter_rejects_empty():
    with pytest.raises(ValueError):
        richter_estimate([], 1, 1)

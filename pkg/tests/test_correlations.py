from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ramanent.correlations import (correlation_from_joint, ideal_correlation, lossy_correlation,
                                   schrodinger_correlation, uncertain_stokes_correlation)
from ramanent.fock_states import DetectionRecord, conditioned_state
from ramanent.noise_models import DetectorEfficiency, DetectorGaussian, detector_posteriors


def test_ideal_minus_one_exact():
    for n in range(51):
        for m in range(51):
            rep = ideal_correlation(DetectionRecord(n, m))
            if n + m >= 2:
                assert rep.C == Fraction(-1)
            elif n + m == 0:
                assert not rep.defined


def test_undefined_at_vacuum():
    assert ideal_correlation(DetectionRecord(0, 0)).C is None


def test_lossy_closed_form_anchor():
    rep = lossy_correlation(DetectionRecord(10, 10), Fraction(1, 2))
    assert rep.C == Fraction(-11, 13)
    assert float(lossy_correlation(DetectionRecord(10, 10), 0.5).C) == pytest.approx(-11 / 13, abs=1e-12)


def test_lossy_closed_form_matches_moments():
    for n in range(8):
        for m in range(8):
            if n + m < 2:
                continue
            for eta in (Fraction(1, 5), Fraction(1, 2), Fraction(9, 10)):
                rep = lossy_correlation(DetectionRecord(n, m), eta)
                cov = rep.mean_nAnB - rep.mean_nA * rep.mean_nB
                assert cov / rep.var_nA == rep.C


def test_lossy_monotone():
    etas = np.linspace(0.05, 1.0, 20)
    for n, m in [(1, 1), (3, 2), (10, 10)]:
        vals = [abs(lossy_correlation(DetectionRecord(n, m), float(e)).C) for e in etas]
        assert np.all(np.diff(vals) >= -1e-15)
    for eta in (0.3, 0.7):
        vals = [abs(lossy_correlation(DetectionRecord(n, n), eta).C) for n in range(1, 30)]
        assert np.all(np.diff(vals) >= -1e-15)


def test_heisenberg_matches_schrodinger():
    for n in range(9):
        for m in range(9):
            if n + m < 2:
                continue
            rec = DetectionRecord(n, m)
            assert schrodinger_correlation(rec).C == ideal_correlation(rec).C
            for eta in (0.3, 0.8):
                a = schrodinger_correlation(rec, eta, eta).C
                b = lossy_correlation(rec, eta).C
                assert a == pytest.approx(b, abs=1e-10)


def mixture_oracle(rec, model):
    """Average the Fock-state joint distribution over the detector posteriors."""
    p_c, p_d = detector_posteriors(rec, model)
    top = p_c.support[-1] + p_d.support[-1]
    joint = np.zeros((top + 1, top + 1))
    for i, a in zip(p_c.support, p_c.probabilities()):
        for j, b in zip(p_d.support, p_d.probabilities()):
            pops = [float(x.square()) for x in conditioned_state(DetectionRecord(i, j)).amplitudes]
            for r, p in enumerate(pops):
                joint[r, i + j - r] += a * b * p
    return correlation_from_joint(joint)


@pytest.mark.parametrize("model", [DetectorEfficiency(0.9, 0.9), DetectorGaussian(2.0, 2.0)])
def test_uncertain_stokes_mixture_oracle(model):
    for rec in (DetectionRecord(3, 3), DetectionRecord(5, 2)):
        got = uncertain_stokes_correlation(rec, model)
        ref = mixture_oracle(rec, model)
        assert got.C == pytest.approx(ref.C, abs=1e-9)
        assert got.mean_nA == pytest.approx(ref.mean_nA, abs=1e-9)


@given(st.integers(0, 30), st.integers(0, 30), st.sampled_from([0.5, 0.9]), st.sampled_from([1.0, 2.0, 4.0]))
def test_posterior_averaged_minus_one(n, m, eta, sigma):
    for model in (DetectorEfficiency(eta, eta), DetectorGaussian(sigma, sigma)):
        rep = uncertain_stokes_correlation(DetectionRecord(n, m), model)
        assert rep.posterior_averaged_C == pytest.approx(-1.0, abs=1e-9)
        # the full mixture sees the spread of the inferred total and is weaker
        assert rep.C is None or -1.0 - 1e-12 <= rep.C < 0


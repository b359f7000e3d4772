"""Conditional photon-number correlation between the two anti-Stokes fields."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from .fock_states import DetectionRecord, conditioned_state
from .noise_models import DEFAULT_TAIL_EPS, WORK_DPS, DetectorModel, detector_posteriors, lossy_joint_distribution


@dataclass(frozen=True)
class CorrelationReport:
    """First and second photon-number moments and the normalized correlation.

    ``C`` is None when a variance vanishes (the correlation is undefined).
    ``posterior_averaged_C`` is only set for detector-noise mixtures: the
    correlation of the posterior-averaged conditional covariance and variances,
    as opposed to ``C``, which also sees the spread of the inferred total.
    """

    mean_nA: object
    mean_nB: object
    mean_nAnB: object
    var_nA: object
    var_nB: object
    C: Optional[object]
    posterior_averaged_C: Optional[float] = None

    @property
    def defined(self) -> bool:
        return self.C is not None


def _report(mean_a, mean_b, mean_ab, mean_a2, mean_b2, exact=False, **extra) -> CorrelationReport:
    var_a = mean_a2 - mean_a * mean_a
    var_b = mean_b2 - mean_b * mean_b
    cov = mean_ab - mean_a * mean_b
    if var_a == 0 or var_b == 0:
        c = None
    elif exact and var_a == var_b:
        c = cov / var_a
    else:
        c = float(cov) / float(np.sqrt(float(var_a) * float(var_b)))
    return CorrelationReport(mean_a, mean_b, mean_ab, var_a, var_b, c, **extra)


def ideal_correlation(rec: DetectionRecord) -> CorrelationReport:
    """Exact moments for ideal detection; C = -1 whenever it is defined."""
    n, m = rec.n, rec.m
    mean = Fraction(n + m, 2)
    mean_ab = Fraction(n * n + m * m - n - m, 4)
    mean_sq = Fraction(n * n + m * m + 4 * n * m + n + m, 4)
    return _report(mean, mean, mean_ab, mean_sq, mean_sq, exact=True)


def uncertain_stokes_correlation(rec: DetectionRecord, model: DetectorModel,
                                 tail_eps: float = DEFAULT_TAIL_EPS) -> CorrelationReport:
    """Moments averaged over the detector posteriors p_C(i|n) p_D(j|m)."""
    p_c, p_d = detector_posteriors(rec, model, tail_eps)
    with mpmath.workdps(WORK_DPS):
        fc = p_c.factorial_moments(2)
        fd = p_d.factorial_moments(2)
        ei, ej = fc[1], fd[1]
        ei2, ej2 = fc[2] + fc[1], fd[2] + fd[1]
        mean = (ei + ej) / 2
        mean_ab = (ei2 + ej2 - ei - ej) / 4
        mean_sq = (ei2 + ej2 + ei + ej + 4 * ei * ej) / 4
        # per-outcome moments: cov = -(i + j + 2ij)/4 = -var
        cond_var = (ei + ej + 2 * ei * ej) / 4
        cond_cov = -cond_var
        averaged = float(cond_cov / cond_var) if cond_var != 0 else None
        to_f = float
        report = _report(to_f(mean), to_f(mean), to_f(mean_ab), to_f(mean_sq), to_f(mean_sq),
                         posterior_averaged_C=averaged)
    return report


def lossy_correlation(rec: DetectionRecord, eta) -> CorrelationReport:
    """Moments after equal readout loss eta on both anti-Stokes fields.

    Pass a Fraction for eta to keep everything exact.
    """
    if not 0 <= eta <= 1:
        raise ValueError("eta must lie in [0, 1]")
    n, m = rec.n, rec.m
    exact = isinstance(eta, (int, Fraction))
    e = Fraction(eta) if exact else float(eta)
    mean = e * (n + m) / 2
    mean_ab = e * e * (n * n + m * m - n - m) / 4
    mean_sq = e * e * (n * n + m * m + 4 * n * m + n + m) / 4 + e * (1 - e) * (n + m) / 2
    report = _report(mean, mean, mean_ab, mean_sq, mean_sq, exact=exact)
    if report.C is None:
        return report
    closed = -1 / (1 + (2 * (1 - e) / e) * Fraction(n + m, n + m + 2 * n * m))
    return CorrelationReport(report.mean_nA, report.mean_nB, report.mean_nAnB,
                             report.var_nA, report.var_nB, closed if exact else float(closed))


def correlation_from_joint(joint: np.ndarray) -> CorrelationReport:
    """Moments of an explicit joint count distribution P[r, s]."""
    r = np.arange(joint.shape[0])[:, None]
    s = np.arange(joint.shape[1])[None, :]
    mean_a = float((joint * r).sum())
    mean_b = float((joint * s).sum())
    return _report(mean_a, mean_b, float((joint * r * s).sum()),
                   float((joint * r * r).sum()), float((joint * s * s).sum()))


def schrodinger_correlation(rec: DetectionRecord, eta_A: float = 1.0, eta_B: float = 1.0) -> CorrelationReport:
    """Correlation computed from the Fock-basis state (with loss traced out)."""
    if eta_A == 1 and eta_B == 1:
        state = conditioned_state(rec)
        pops = [a.square() for a in state.amplitudes]
        total = rec.total
        mean_a = sum(p * i for i, p in enumerate(pops))
        mean_b = sum(p * (total - i) for i, p in enumerate(pops))
        mean_ab = sum(p * i * (total - i) for i, p in enumerate(pops))
        mean_a2 = sum(p * i * i for i, p in enumerate(pops))
        mean_b2 = sum(p * (total - i) ** 2 for i, p in enumerate(pops))
        return _report(mean_a, mean_b, mean_ab, mean_a2, mean_b2, exact=True)
    return correlation_from_joint(lossy_joint_distribution(rec, eta_A, eta_B))

"""Search and sweep drivers: MaxN/MinN along n = m, (n, m) region maps,
a-priori detection probability, and detector-noise sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .fock_states import DetectionRecord, SqueezingParams, stokes_joint_probability
from .noise_models import DEFAULT_TAIL_EPS, DetectorEfficiency, DetectorGaussian, Ideal, NoiseModel
from .pt_moments import TensorFunctionSpec, is_detected

TABLE1 = {
    (1, 2): 13,
    (1, 3): 28,
    (1, 4): 48,
    (1, 5): 72,
    (2, 3): 91,
    (1, 2, 3): 114,
    (2, 3, 4): 403,
    (1, 2, 3, 4): 444,
}


@dataclass(frozen=True)
class DiagonalScan:
    """Verdicts along n = m up to ``n_cap``."""

    spec: TensorFunctionSpec
    model: NoiseModel
    detected: tuple
    n_cap: int
    stopped_at: int

    @property
    def min_n(self) -> Optional[int]:
        return self.detected[0] if self.detected else None

    @property
    def max_n(self) -> Optional[int]:
        return self.detected[-1] if self.detected else None

    @property
    def contiguous(self) -> bool:
        return not self.detected or self.detected[-1] - self.detected[0] + 1 == len(self.detected)

    @property
    def capped(self) -> bool:
        """Detection still present at the cap, so the true MaxN may be larger."""
        return self.max_n == self.n_cap


@dataclass
class ScanResult:
    spec: TensorFunctionSpec
    model: NoiseModel
    max_n: Optional[int] = None
    min_n: Optional[int] = None
    region: frozenset = frozenset()
    apriori_probability: Optional[float] = None
    grid: tuple = (0, 0)
    weights: dict = field(default_factory=dict)


def _diag_verdict(args):
    spec, model, n, tail_eps = args
    return is_detected(spec, DetectionRecord(n, n), model, tail_eps)


def diagonal_scan(spec: TensorFunctionSpec, model: NoiseModel = Ideal(), n_cap: int = 600,
                  stop_after: Optional[int] = 50, tail_eps: float = DEFAULT_TAIL_EPS,
                  n_start: int = 1) -> DiagonalScan:
    """Upward scan of n = m from ``n_start``.

    After the first detection, the scan stops once ``stop_after`` consecutive
    n fail to detect; ``stop_after=None`` scans all the way to ``n_cap``.
    """
    detected = []
    misses = 0
    n = n_start
    for n in range(n_start, n_cap + 1):
        if is_detected(spec, DetectionRecord(n, n), model, tail_eps):
            detected.append(n)
            misses = 0
        elif detected:
            misses += 1
            if stop_after is not None and misses >= stop_after:
                break
    return DiagonalScan(spec, model, tuple(detected), n_cap, n)


def find_max_n(spec: TensorFunctionSpec, model: NoiseModel = Ideal(), n_cap: int = 600,
               stop_after: Optional[int] = 50, tail_eps: float = DEFAULT_TAIL_EPS):
    """(min_n, max_n) of the detected diagonal, or None if nothing detects."""
    scan = diagonal_scan(spec, model, n_cap, stop_after, tail_eps)
    if not scan.detected:
        return None
    return scan.min_n, scan.max_n


def _region_cell(args):
    spec, model, n, m, tail_eps = args
    return is_detected(spec, DetectionRecord(n, m), model, tail_eps)


def region_scan(spec: TensorFunctionSpec, model: NoiseModel, n_max: int, m_max: int,
                alpha: Optional[float] = None, tail_eps: float = DEFAULT_TAIL_EPS,
                workers: int = 1, symmetric: bool = True) -> ScanResult:
    """Verdict for every (n, m) with 0 <= n < n_max and 0 <= m < m_max.

    With ``symmetric`` the (m, n) verdict is reused for (n, m); the moment
    formulas are symmetric under that exchange. Any worker count gives the
    same result.
    """
    cells = [(n, m) for n in range(n_max) for m in range(m_max)]
    todo = [(n, m) for n, m in cells if not (symmetric and m < n and m < n_max and n < m_max)]
    args = [(spec, model, n, m, tail_eps) for n, m in todo]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            flags = list(pool.map(_region_cell, args, chunksize=64))
    else:
        flags = [_region_cell(a) for a in args]
    verdicts = dict(zip(todo, flags))
    region = set()
    for n, m in cells:
        key = (n, m) if (n, m) in verdicts else (m, n)
        if verdicts[key]:
            region.add((n, m))
    result = ScanResult(spec, model, region=frozenset(region), grid=(n_max, m_max))
    diag = sorted(n for n, m in region if n == m)
    if diag:
        result.min_n, result.max_n = diag[0], diag[-1]
    if alpha is not None:
        params = SqueezingParams.equal(alpha)
        result.weights = {(n, m): stokes_joint_probability(params, DetectionRecord(n, m)) for n, m in cells}
        result.apriori_probability = sum(result.weights[c] for c in region)
    return result


def geometric_cutoff(alpha: float, tail_eps: float) -> int:
    """Smallest K with P(n >= K or m >= K) < tail_eps for two geometric counts."""
    t2 = math.tanh(alpha) ** 2
    if t2 == 0:
        return 1
    return max(1, int(math.ceil(math.log(tail_eps / 2) / math.log(t2))))


def apriori_probability(spec: TensorFunctionSpec, alpha: float, tail_eps: float = 1e-12,
                        model: NoiseModel = Ideal(), region: Optional[frozenset] = None) -> float:
    """Observation-weighted share of detectable (n, m) at equal squeezing alpha.

    ``region`` may pass a precomputed detected set covering the truncated grid.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    k = geometric_cutoff(alpha, tail_eps)
    params = SqueezingParams.equal(alpha)
    terms = []
    for n in range(k):
        for m in range(k):
            if region is not None:
                hit = (n, m) in region
            else:
                hit = is_detected(spec, DetectionRecord(n, m), model)
            if hit:
                terms.append(stokes_joint_probability(params, DetectionRecord(n, m)))
    return math.fsum(terms)


def apriori_curve(spec: TensorFunctionSpec, alphas: Sequence[float], tail_eps: float = 1e-12,
                  model: NoiseModel = Ideal()) -> list:
    """apriori_probability over several alphas, sharing one region scan."""
    k = max(geometric_cutoff(a, tail_eps) for a in alphas)
    region = region_scan(spec, model, k, k, tail_eps=tail_eps).region
    return [(a, apriori_probability(spec, a, tail_eps, model, region)) for a in alphas]


@dataclass(frozen=True)
class SweepPoint:
    parameter: float
    min_n: Optional[int]
    max_n: Optional[int]


@dataclass(frozen=True)
class EfficiencyCurve:
    points: tuple
    slope: float
    intercept: float
    residual_rms: float


def efficiency_sweep(spec: TensorFunctionSpec, eta_grid: Sequence[float], n_cap: int = 600,
                     tail_eps: float = DEFAULT_TAIL_EPS) -> EfficiencyCurve:
    """MaxN versus eta_C = eta_D, with a least-squares line through the curve."""
    points = []
    for eta in eta_grid:
        model = Ideal() if eta == 1 else DetectorEfficiency(eta, eta)
        scan = diagonal_scan(spec, model, n_cap, tail_eps=tail_eps)
        points.append(SweepPoint(float(eta), scan.min_n, scan.max_n))
    xs = np.array([p.parameter for p in points if p.max_n is not None])
    ys = np.array([p.max_n for p in points if p.max_n is not None], dtype=float)
    if xs.size >= 2:
        slope, intercept = np.polyfit(xs, ys, 1)
        resid = float(np.sqrt(np.mean((ys - (slope * xs + intercept)) ** 2)))
    else:
        slope = intercept = resid = float("nan")
    return EfficiencyCurve(tuple(points), float(slope), float(intercept), resid)


def sigma_window(spec: TensorFunctionSpec, sigma: float, n_cap: int = 600,
                 tail_eps: float = DEFAULT_TAIL_EPS) -> DiagonalScan:
    return diagonal_scan(spec, DetectorGaussian(sigma, sigma), n_cap, tail_eps=tail_eps)


def closure_sigma(spec: TensorFunctionSpec, lo: float, hi: float, step: float = 0.005,
                  n_cap: int = 600, tail_eps: float = DEFAULT_TAIL_EPS) -> float:
    """Smallest sigma on the ``step`` grid where the detected diagonal is empty.

    Bisects between ``lo`` (must detect) and ``hi`` (must not).
    """
    j_lo, j_hi = int(round(lo / step)), int(round(hi / step))

    def empty(j):
        return not sigma_window(spec, j * step, n_cap, tail_eps).detected

    if empty(j_lo):
        raise ValueError(f"nothing detected at the lower bracket sigma = {lo}")
    if not empty(j_hi):
        raise ValueError(f"detection persists at the upper bracket sigma = {hi}")
    while j_hi - j_lo > 1:
        mid = (j_lo + j_hi) // 2
        if empty(mid):
            j_hi = mid
        else:
            j_lo = mid
    return round(j_hi * step, 6)


@dataclass(frozen=True)
class SigmaCurve:
    points: tuple
    closure: Optional[float]


def sigma_sweep(spec: TensorFunctionSpec, sigma_grid: Sequence[float], n_cap: int = 600,
                tail_eps: float = DEFAULT_TAIL_EPS, find_closure: bool = True,
                step: float = 0.005) -> SigmaCurve:
    """(MinN, MaxN) versus sigma_C = sigma_D; optionally locates the closure sigma."""
    points = []
    for sigma in sigma_grid:
        scan = sigma_window(spec, sigma, n_cap, tail_eps)
        points.append(SweepPoint(float(sigma), scan.min_n, scan.max_n))
    closure = None
    if find_closure:
        alive = [p.parameter for p in points if p.max_n is not None]
        dead = [p.parameter for p in points if p.max_n is None and alive and p.parameter > max(alive)]
        if alive and dead:
            closure = closure_sigma(spec, max(alive), min(dead), step, n_cap, tail_eps)
    return SigmaCurve(tuple(points), closure)

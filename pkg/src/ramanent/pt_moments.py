"""Partial-transpose moment matrices for the tensor functions
f = (1, a^2 b^2, a^4 b^4, ...), and the entanglement verdicts drawn from them."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .exact_core import Surd, binomial, falling_factorial
from .fock_states import DetectionRecord, conditioned_state
from .noise_models import (
    DEFAULT_TAIL_EPS,
    WORK_DPS,
    DetectorEfficiency,
    DetectorGaussian,
    Ideal,
    NoiseModel,
    ReadoutLoss,
    detector_posteriors,
    loss_amplitude,
)

ORACLE_BOUND = 60
# relative zero threshold on the equilibrated matrix (non-exact entries only)
EIG_ZERO_TOL = 1e-10


@dataclass(frozen=True)
class TensorFunctionSpec:
    """Index t selects the term a^{2(t-1)} b^{2(t-1)}; index 1 is the identity."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(t) for t in self.indices)
        if not idx:
            raise ValueError("tensor function needs at least one index")
        if any(t < 1 for t in idx) or any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValueError(f"indices must be positive and strictly increasing, got {idx}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def parse(cls, text: str) -> "TensorFunctionSpec":
        return cls(tuple(int(t) for t in text.replace(" ", "").split(",") if t))

    @property
    def orders(self) -> tuple:
        return tuple(2 * (t - 1) for t in self.indices)

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def degree_sum(self) -> int:
        """Sum of (t - 1) over the indices."""
        return sum(t - 1 for t in self.indices)

    def label(self) -> str:
        return "f_{" + ",".join(map(str, self.indices)) + "}"

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class MomentMatrix:
    spec: TensorFunctionSpec
    entries: tuple
    exact: bool
    transposed: bool = True

    @property
    def dim(self) -> int:
        return len(self.entries)

    def to_float(self):
        import numpy as np
        return np.array([[float(x) for x in row] for row in self.entries])


@dataclass(frozen=True)
class PTVerdict:
    determinant: object
    negative_eigenvalue_count: int
    minor_violation: bool
    entangled_detected: bool


@lru_cache(maxsize=None)
def g_coefficients(k: int, l: int) -> tuple:
    """g(h) for h = 0..k+l as exact Fractions."""
    out = []
    for h in range(k + l + 1):
        acc = 0
        for r in range(k + 1):
            br = binomial(k, r) * binomial(l, h - r)
            if br == 0:
                continue
            for i in range(l + 1):
                term = br * binomial(l, i) * binomial(k, h - i)
                acc += -term if (r + i) % 2 else term
        out.append(Fraction(acc, 2 ** (k + l)))
    return tuple(out)


def g_coefficient(k: int, l: int, h: int) -> Fraction:
    if not 0 <= h <= k + l:
        raise ValueError(f"h must lie in 0..{k + l}")
    return g_coefficients(k, l)[h]


def pt_moment_ideal(k: int, l: int, rec: DetectionRecord) -> Fraction:
    """<a^+k b^+l a^l b^k> for ideal Stokes counts, exact."""
    return sum(
        (g * falling_factorial(rec.n, h) * falling_factorial(rec.m, k + l - h)
         for h, g in enumerate(g_coefficients(k, l))),
        Fraction(0),
    )


def pt_moment_noisy(k: int, l: int, rec: DetectionRecord, model, tail_eps: float = DEFAULT_TAIL_EPS):
    """Posterior-averaged moment for a noisy Stokes detector, as an mpf."""
    p_c, p_d = detector_posteriors(rec, model, tail_eps)
    return _noisy_from_factorial(k, l, p_c.factorial_moments(k + l), p_d.factorial_moments(k + l))


def _noisy_from_factorial(k, l, fc, fd):
    with mpmath.workdps(WORK_DPS):
        return mpmath.fsum(
            mpmath.mpf(g.numerator) / g.denominator * fc[h] * fd[k + l - h]
            for h, g in enumerate(g_coefficients(k, l)) if g
        )


def _loss_prefactor(k: int, l: int, eta_A, eta_B):
    prod = Fraction(eta_A) * Fraction(eta_B)
    if (k + l) % 2 == 0:
        return prod ** ((k + l) // 2)
    return Surd(Fraction(1), prod) * prod ** ((k + l) // 2)


def pt_moment_lossy(k: int, l: int, rec: DetectionRecord, eta_A, eta_B):
    """Ideal moment times (sqrt(eta_A eta_B))^(k+l); exact for even k + l."""
    pref = _loss_prefactor(k, l, eta_A, eta_B)
    base = pt_moment_ideal(k, l, rec)
    if isinstance(pref, Surd):
        return float(pref * base)
    return pref * base


def build_pt_matrix(spec: TensorFunctionSpec, rec: DetectionRecord, model: NoiseModel = Ideal(),
                    tail_eps: float = DEFAULT_TAIL_EPS) -> MomentMatrix:
    """Moment matrix of the partially transposed state for ``spec``."""
    orders = spec.orders
    if isinstance(model, Ideal):
        rows = tuple(tuple(pt_moment_ideal(a, b, rec) for b in orders) for a in orders)
        return MomentMatrix(spec, rows, exact=True)
    if isinstance(model, ReadoutLoss):
        rows = tuple(tuple(pt_moment_lossy(a, b, rec, model.eta_A, model.eta_B) for b in orders)
                     for a in orders)
        return MomentMatrix(spec, rows, exact=True)
    if isinstance(model, (DetectorEfficiency, DetectorGaussian)):
        p_c, p_d = detector_posteriors(rec, model, tail_eps)
        top = 2 * max(orders)
        fc, fd = p_c.factorial_moments(top), p_d.factorial_moments(top)
        rows = tuple(tuple(_noisy_from_factorial(a, b, fc, fd) for b in orders) for a in orders)
        return MomentMatrix(spec, rows, exact=False)
    raise TypeError(f"unsupported noise model {model!r}")


def schrodinger_oracle_moment(k: int, l: int, rec: DetectionRecord, model: NoiseModel = Ideal(),
                              bound: int = ORACLE_BOUND):
    """The same moment by explicit operator action on the Fock-basis state.

    Ideal: exact Fraction. ReadoutLoss: float, with loss modes traced out.
    """
    total = rec.total
    if total > bound:
        raise ValueError(f"n + m = {total} exceeds the oracle bound {bound}")
    amps = conditioned_state(rec).amplitudes
    shift = k - l
    if isinstance(model, Ideal):
        acc = Fraction(0)
        for i in range(total + 1):
            ip = i + shift
            if not 0 <= ip <= total:
                continue
            weight = (falling_factorial(ip, k) * falling_factorial(total - ip, l)
                      * falling_factorial(i, l) * falling_factorial(total - i, k))
            if weight == 0:
                continue
            acc += (amps[ip] * amps[i] * Surd(Fraction(1), Fraction(weight))).to_fraction()
        return acc
    if isinstance(model, ReadoutLoss):
        ea, eb = model.eta_A, model.eta_B
        c = [float(a) for a in amps]
        terms = []
        for i in range(total + 1):
            ip = i + shift
            if not 0 <= ip <= total or c[i] == 0 or c[ip] == 0:
                continue
            for r in range(i + 1):
                rp = r + shift
                if not 0 <= rp <= ip:
                    continue
                for s in range(total - i + 1):
                    sp = s - shift
                    if not 0 <= sp <= total - ip:
                        continue
                    op = math.sqrt(falling_factorial(rp, k) * falling_factorial(sp, l)
                                   * falling_factorial(r, l) * falling_factorial(s, k))
                    if op == 0:
                        continue
                    terms.append(c[ip] * c[i] * op
                                 * loss_amplitude(ip, total, rp, sp, ea, eb)
                                 * loss_amplitude(i, total, r, s, ea, eb))
        return math.fsum(terms)
    raise TypeError("the Schrodinger oracle supports Ideal and ReadoutLoss only")


# exact linear algebra


def exact_det(rows) -> Fraction:
    a = [[Fraction(x) for x in row] for row in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det


def charpoly(rows) -> list:
    """Monic characteristic polynomial coefficients, highest degree first (Faddeev-LeVerrier)."""
    a = [[Fraction(x) for x in row] for row in rows]
    n = len(a)
    coeffs = [Fraction(1)]
    m = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        c_prev = coeffs[-1]
        m = [[sum(a[i][t] * m[t][j] for t in range(n)) + (c_prev if i == j else 0) for j in range(n)]
             for i in range(n)]
        trace = sum(sum(a[i][t] * m[t][i] for t in range(n)) for i in range(n))
        coeffs.append(-trace / k)
    return coeffs


def _sign_changes(seq) -> int:
    signs = [x > 0 for x in seq if x != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def count_negative_eigenvalues_exact(rows) -> int:
    """Negative eigenvalues of a real symmetric matrix by Descartes' rule.

    The characteristic polynomial of a symmetric matrix is real-rooted, so the
    sign-change count of p(-x) is exact.
    """
    coeffs = charpoly(rows)
    deg = len(coeffs) - 1
    return _sign_changes([c if (deg - j) % 2 == 0 else -c for j, c in enumerate(coeffs)])


def _principal_index_sets(r: int):
    if r <= 4:
        for size in range(1, r + 1):
            yield from itertools.combinations(range(r), size)
    else:
        for size in range(1, r + 1):
            yield tuple(range(size))


def _check_symmetric(rows, exact: bool):
    r = len(rows)
    for i in range(r):
        for j in range(i + 1, r):
            a, b = rows[i][j], rows[j][i]
            if exact:
                if a != b:
                    raise ValueError("moment matrix is not symmetric")
            elif abs(a - b) > 1e-30 * (abs(a) + abs(b) + 1):
                raise ValueError("moment matrix is not symmetric")


def _equilibrate(rows):
    r = len(rows)
    d = [1 / mpmath.sqrt(abs(rows[i][i])) if rows[i][i] != 0 else mpmath.mpf(1) for i in range(r)]
    return mpmath.matrix([[rows[i][j] * d[i] * d[j] for j in range(r)] for i in range(r)])


def verdict(matrix: MomentMatrix, zero_tol: float = EIG_ZERO_TOL) -> PTVerdict:
    """Entanglement verdict: any negative eigenvalue or negative principal minor."""
    rows = matrix.entries
    r = len(rows)
    _check_symmetric(rows, matrix.exact)
    if matrix.exact:
        det = exact_det(rows)
        neg = count_negative_eigenvalues_exact(rows)
        minor_bad = any(
            exact_det([[rows[i][j] for j in idx] for i in idx]) < 0 for idx in _principal_index_sets(r)
        )
        return PTVerdict(det, neg, minor_bad, neg > 0 or minor_bad)
    with mpmath.workdps(WORK_DPS):
        full = mpmath.matrix([[mpmath.mpf(x) for x in row] for row in rows])
        det = mpmath.det(full)
        # congruence by a positive diagonal keeps the inertia (Sylvester) and
        # brings entries spanning many decades to unit scale
        scaled = _equilibrate(rows)
        evals, _ = mpmath.eigsy(scaled)
        tol = zero_tol * mpmath.mnorm(scaled, "F")
        neg = sum(1 for e in evals if e < -tol)
        minor_bad = False
        for idx in _principal_index_sets(r):
            sub = mpmath.matrix([[scaled[i, j] for j in idx] for i in idx])
            if mpmath.det(sub) < -tol:
                minor_bad = True
                break
    return PTVerdict(det, neg, minor_bad, neg > 0 or minor_bad)


def det_f12_closed_form(n: int) -> Fraction:
    """Determinant for f_{1,2} at n = m as a quartic in n."""
    n = Fraction(n)
    return -Fraction(3, 4) * n + Fraction(11, 8) * n ** 2 - Fraction(7, 4) * n ** 3 + Fraction(1, 8) * n ** 4


def is_detected(spec: TensorFunctionSpec, rec: DetectionRecord, model: NoiseModel = Ideal(),
                tail_eps: float = DEFAULT_TAIL_EPS) -> bool:
    return verdict(build_pt_matrix(spec, rec, model, tail_eps)).entangled_detected

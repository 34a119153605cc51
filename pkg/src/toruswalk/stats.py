"""Pass/fail numerical tests for distributional and measurability claims.

The universal currency is the empirical characteristic function (ECF): the
complex mean of exp(2 i pi p theta) over the samples.  Under the null its
modulus is asymptotically Rayleigh with scale 1/sqrt(2n), so the fixed
threshold 4/sqrt(n) has per-test false-alarm probability about e^{-16} and a
suite of dozens of tests stays deterministic in practice.  Finite-window
truncation bias, where the simulator can compute it in closed form, is added
on top of the threshold.

Everything here is a pure function of its input arrays: no hidden randomness,
thresholds in closed form, reports serializable as rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .classify import Regime, classify
from .sequences import MeasureSequence
from .simulate import ChainConfig, ChainEnsemble, DeterministicAnchor, simulate
from .torus import circle_dist, frac, frac_scalar

__all__ = [
    "TooFewSamplesError",
    "ShapeMismatchError",
    "RegimeMismatchError",
    "ecf",
    "ecf_threshold",
    "EcfRow",
    "EcfReport",
    "uniformity",
    "CrossCharRow",
    "CrossCharReport",
    "independence",
    "joint_character",
    "BucketReport",
    "bucket_uniformity",
    "MeasurabilityReport",
    "measurability_check",
    "two_sample_ecf_distance",
    "recursion_residual",
    "telescope_residual",
    "noise_recovery_residual",
    "pathwise_determinism_residual",
]

MEASURABILITY_TOL = 1e-9
CHI2_SIGNIFICANCE = 1e-3


class TooFewSamplesError(ValueError):
    """Raised when a test needs more samples than were provided."""


class ShapeMismatchError(ValueError):
    """Raised when sample arrays that must align do not."""


class RegimeMismatchError(ValueError):
    """Raised when a test's regime precondition does not hold."""


def ecf(samples: np.ndarray, p: int) -> complex:
    """Empirical characteristic function (1/n) sum exp(2 i pi p theta_i)."""
    return complex(np.mean(np.exp(2j * math.pi * p * samples)))


def ecf_threshold(n: int) -> float:
    """The fixed per-frequency acceptance threshold 4/sqrt(n)."""
    return 4.0 / math.sqrt(n)


@dataclass(frozen=True)
class EcfRow:
    p: int
    value: complex
    modulus: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class EcfReport:
    rows: tuple[EcfRow, ...]
    n: int

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def max_modulus(self) -> float:
        return max(r.modulus for r in self.rows)


def uniformity(samples: np.ndarray, p_max: int, bias: float = 0.0) -> EcfReport:
    """ECF uniformity test at frequencies 1..p_max.

    Passes when every modulus is at most 4/sqrt(n) plus the supplied
    finite-window bias.
    """
    samples = np.asarray(samples, dtype=np.float64)
    n = len(samples)
    if n < 100:
        raise TooFewSamplesError(f"uniformity needs n >= 100, got {n}")
    z = np.exp(2j * math.pi * samples)
    zp = np.ones_like(z)
    thr = ecf_threshold(n) + bias
    rows = []
    for p in range(1, p_max + 1):
        zp = zp * z
        val = complex(np.mean(zp))
        m = abs(val)
        rows.append(EcfRow(p=p, value=val, modulus=m, threshold=thr, passed=m <= thr))
    return EcfReport(rows=tuple(rows), n=n)


@dataclass(frozen=True)
class CrossCharRow:
    p: int
    q: int
    j: int
    modulus: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class CrossCharReport:
    rows: tuple[CrossCharRow, ...]
    n: int

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def max_modulus(self) -> float:
        return max(r.modulus for r in self.rows)


def independence(
    theta: np.ndarray,
    noise_by_index: dict[int, np.ndarray],
    p_list,
    q_list,
    bias=None,
) -> CrossCharReport:
    """Cross-character test of theta against each noise array.

    Each entry is the modulus of (1/n) sum exp(2 i pi (p theta - q xi_j)),
    compared against 4/sqrt(n) plus an optional bias term (a float, or a
    callable (p, q, j) -> float supplied by the simulator).
    """
    theta = np.asarray(theta, dtype=np.float64)
    n = len(theta)
    base_thr = ecf_threshold(n)
    rows = []
    for j, xi in noise_by_index.items():
        xi = np.asarray(xi, dtype=np.float64)
        if len(xi) != n:
            raise ShapeMismatchError(f"noise at index {j} has {len(xi)} samples, theta has {n}")
        for p in p_list:
            for q in q_list:
                val = np.mean(np.exp(2j * math.pi * (p * theta - q * xi)))
                m = float(abs(val))
                b = bias(p, q, j) if callable(bias) else (bias or 0.0)
                thr = base_thr + b
                rows.append(CrossCharRow(p=p, q=q, j=j, modulus=m, threshold=thr, passed=m <= thr))
    return CrossCharReport(rows=tuple(rows), n=n)


def joint_character(theta: np.ndarray, p: int, terms: list[tuple[int, np.ndarray]]) -> float:
    """Modulus of (1/n) sum exp(2 i pi (p theta - sum_i q_i xi_i)).

    Pairwise cross-characters test a weaker property than independence from
    the joint noise sigma-field; small tuples tighten the net a notch.
    """
    theta = np.asarray(theta, dtype=np.float64)
    phase = p * theta.astype(np.float64)
    for q, xi in terms:
        if len(xi) != len(theta):
            raise ShapeMismatchError("joint character arrays must align")
        phase = phase - q * np.asarray(xi, dtype=np.float64)
    return float(abs(np.mean(np.exp(2j * math.pi * phase))))


@dataclass(frozen=True)
class BucketReport:
    p: int
    counts: np.ndarray
    statistic: float
    critical: float
    passed: bool


def bucket_uniformity(samples: np.ndarray, p: int) -> BucketReport:
    """Chi-square goodness of fit of floor(p * theta) to uniform on p buckets."""
    samples = np.asarray(samples, dtype=np.float64)
    n = len(samples)
    if p < 2:
        raise ValueError("p must be >= 2")
    if n < 100 * p:
        raise TooFewSamplesError(f"bucket test needs n >= {100 * p}, got {n}")
    buckets = np.minimum(np.floor(samples * p).astype(np.int64), p - 1)
    counts = np.bincount(buckets, minlength=p)
    expected = n / p
    stat = float(np.sum((counts - expected) ** 2) / expected)
    crit = float(chi2.isf(CHI2_SIGNIFICANCE, p - 1))
    return BucketReport(p=p, counts=counts, statistic=stat, critical=crit, passed=stat <= crit)


@dataclass(frozen=True)
class MeasurabilityReport:
    p: int
    base_anchor: float
    shifted_anchor: float
    max_discrepancy: float
    tolerance: float
    passed: bool


def measurability_check(
    seq: MeasureSequence,
    p: int,
    samples: int,
    seed: int,
    depth: int = 30,
    base_anchor: float = 0.0,
    shift: float | None = None,
) -> MeasurabilityReport:
    """Witness that frac(p * eta_k) is determined by the noise alone.

    Runs the chain twice with identical noise (same seed) from anchors v and
    v + shift, where shift defaults to 1/p (a step inside the anchor's coset).
    If frac(p * eta_k) agrees pathwise at every index, the anchor's coset
    representative is invisible through p-fold winding, i.e. frac(p * eta_k)
    is noise-measurable.  Passing ``shift`` off the coset (e.g. 1/(2p)) gives
    the negative control, which must fail.

    Requires the classified regime to be C3 with generator p.
    """
    result = classify(seq)
    if result.regime is not Regime.NEITHER or result.generator != p:
        raise RegimeMismatchError(
            f"measurability check needs regime C3 with generator {p}, got "
            f"{result.regime} with generator {result.generator}"
        )
    if shift is None:
        shift = 1.0 / p
    e1 = simulate(ChainConfig(seq, depth, DeterministicAnchor(base_anchor), samples, seed))
    e2 = simulate(
        ChainConfig(seq, depth, DeterministicAnchor(frac_scalar(base_anchor + shift)), samples, seed)
    )
    d = circle_dist(frac(p * e1.states), frac(p * e2.states))
    max_d = float(np.max(d))
    return MeasurabilityReport(
        p=p,
        base_anchor=frac_scalar(base_anchor),
        shifted_anchor=frac_scalar(base_anchor + shift),
        max_discrepancy=max_d,
        tolerance=MEASURABILITY_TOL,
        passed=max_d <= MEASURABILITY_TOL,
    )


def two_sample_ecf_distance(a: np.ndarray, b: np.ndarray, p_max: int) -> float:
    """max over p <= p_max of |ECF_a(p) - ECF_b(p)| (convergence-in-law metric)."""
    return max(abs(ecf(a, p) - ecf(b, p)) for p in range(1, p_max + 1))


# ---------------------------------------------------------------------------
# pathwise algebra on ensembles


def recursion_residual(ensemble: ChainEnsemble) -> float:
    """Max deviation from states[k] = frac(noise[k] + states[k-1]); 0 bitwise."""
    s = ensemble.states[:, :-1] + ensemble.noise
    f = s - np.floor(s)
    f[f >= 1.0] -= 1.0
    return float(np.max(np.abs(ensemble.states[:, 1:] - f)))


def telescope_residual(ensemble: ChainEnsemble) -> float:
    """Max circular gap between eta_0 and frac(anchor + sum of noise).

    The sum runs in ascending time order, the fixed convention that makes a
    1e-9 comparison meaningful.
    """
    acc = ensemble.anchor_draws.copy()
    for col in range(ensemble.noise.shape[1]):
        acc += ensemble.noise[:, col]
    return float(np.max(circle_dist(ensemble.eta0, frac(acc))))


def noise_recovery_residual(ensemble: ChainEnsemble) -> float:
    """Max circular gap in xi_k = frac(eta_k - eta_{k-1}), the noise identity."""
    diff = frac(ensemble.states[:, 1:] - ensemble.states[:, :-1])
    return float(np.max(circle_dist(diff, ensemble.noise)))


def pathwise_determinism_residual(ensemble: ChainEnsemble) -> float:
    """Max circular gap of eta_0 = frac(eta_j + xi_{j+1} + ... + xi_0) over all j.

    Together with a passing independence report this witnesses that the
    intersection-of-sigma-fields identity fails to commute with joins: each
    eta_j plus the later noise determines eta_0 pathwise, while eta_0 stays
    statistically independent of the whole noise sequence.
    """
    n, m = ensemble.noise.shape
    worst = 0.0
    suffix = np.zeros(n, dtype=np.float64)
    # j runs from time -1 down to -N-1; suffix accumulates the later noise
    for col in range(m - 1, -1, -1):
        suffix = suffix + ensemble.noise[:, col]
        recon = frac(ensemble.states[:, col] + suffix)
        worst = max(worst, float(np.max(circle_dist(ensemble.eta0, recon))))
    return worst

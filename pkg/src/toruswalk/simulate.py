"""Seeded Monte Carlo engine for the circle recursion and its variants.

Everything here is a pure function of its seed: noise draws are indexed by
(sample, time) through the counter RNG, so ensembles are reproducible under
any worker count, and runs at different depths or truncations share the draws
of their common time indexes.  That sharing is what turns almost-sure
convergence statements into pathwise-coupling tests.

Time indexing: a depth-N ensemble holds noise xi_k for k = -N..0 and states
eta_k for k = -N-1..0, where eta_{-N-1} is the anchor draw and
eta_k = frac(xi_k + eta_{k-1}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import rng
from ._kernels import chain_states
from .classify import NoConstructiveCenteringError, Regime, centering, classify
from .measures import (
    CyclicDistribution,
    Dirac,
    NotOnCyclicGridError,
    TorusMeasure,
    arithmetic_structure,
    cyclic_convolve,
    to_cyclic,
)
from .sequences import IidTail, MeasureSequence, WrappedGaussianTail
from .torus import frac, frac_scalar

__all__ = [
    "DeterministicAnchor",
    "UniformAnchor",
    "LawAnchor",
    "ChainConfig",
    "ChainEnsemble",
    "SkeletonConfig",
    "SkeletonEnsemble",
    "StrongLimitResult",
    "CenteredProductResult",
    "HaarConvergence",
    "ConvolutionPowerTable",
    "NotStrongRegimeError",
    "simulate",
    "translate",
    "mixture_pair",
    "strong_limit",
    "truncation_tail_variance",
    "centered_products",
    "convolution_power",
    "skeleton",
    "window_bias",
    "cross_character_bias",
    "exact_cyclic_law",
    "tv_distance_on_grid",
]


class NotStrongRegimeError(ValueError):
    """Raised when a strong-limit construction is requested outside regime C2."""


@dataclass(frozen=True)
class DeterministicAnchor:
    v: float

    def draw(self, n, seed):
        return np.full(n, frac_scalar(self.v), dtype=np.float64)


@dataclass(frozen=True)
class UniformAnchor:
    def draw(self, n, seed):
        return rng.uniforms(seed, rng.STREAM_ANCHOR, np.arange(n), 0)


@dataclass(frozen=True)
class LawAnchor:
    law: TorusMeasure

    def draw(self, n, seed):
        return self.law.sample(n, seed, stream=rng.STREAM_ANCHOR, slot=0)


Anchor = DeterministicAnchor | UniformAnchor | LawAnchor


@dataclass(frozen=True)
class ChainConfig:
    seq: MeasureSequence
    depth: int
    anchor: Anchor
    samples: int
    seed: int

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")


@dataclass(eq=False)
class ChainEnsemble:
    """Noise and state paths over the window [-N, 0].

    ``noise`` has shape (n, N+1) with column j holding xi_{j-N}; ``states``
    has shape (n, N+2) with column j holding eta_{j-N-1}.  ``anchor_draws``
    aliases the first state column.
    """

    config: ChainConfig
    noise: np.ndarray
    states: np.ndarray
    anchor_draws: np.ndarray

    def noise_at(self, k: int) -> np.ndarray:
        if not -self.config.depth <= k <= 0:
            raise IndexError(f"noise index {k} outside [-{self.config.depth}, 0]")
        return self.noise[:, k + self.config.depth]

    def state_at(self, k: int) -> np.ndarray:
        if not -self.config.depth - 1 <= k <= 0:
            raise IndexError(f"state index {k} outside [-{self.config.depth + 1}, 0]")
        return self.states[:, k + self.config.depth + 1]

    @property
    def eta0(self) -> np.ndarray:
        return self.states[:, -1]


def _draw_noise(seq: MeasureSequence, depth: int, samples: int, seed: int) -> np.ndarray:
    noise = np.empty((samples, depth + 1), dtype=np.float64)
    for k in range(-depth, 1):
        # slot -k makes the draw for time k independent of the depth
        noise[:, k + depth] = seq.measure_at(k).sample(
            samples, seed, stream=rng.STREAM_NOISE, slot=-k
        )
    return noise


def simulate(config: ChainConfig) -> ChainEnsemble:
    """Draw anchors and noise, then iterate eta_k = frac(xi_k + eta_{k-1})."""
    anchors = config.anchor.draw(config.samples, config.seed)
    noise = _draw_noise(config.seq, config.depth, config.samples, config.seed)
    states = chain_states(noise, anchors)
    return ChainEnsemble(config=config, noise=noise, states=states, anchor_draws=states[:, 0])


def translate(ensemble: ChainEnsemble, g: float) -> ChainEnsemble:
    """The ensemble with every state shifted by g (noise untouched).

    Re-runs the recursion from the shifted anchors so the result is bitwise
    the same as simulating with the shifted anchor under the same seed, and
    the pathwise recursion invariant stays exact.
    """
    anchors = frac(ensemble.anchor_draws + g)
    states = chain_states(ensemble.noise, anchors)
    config = ensemble.config
    if isinstance(config.anchor, DeterministicAnchor):
        config = replace(config, anchor=DeterministicAnchor(frac_scalar(config.anchor.v + g)))
    return ChainEnsemble(config=config, noise=ensemble.noise, states=states, anchor_draws=states[:, 0])


def mixture_pair(
    seq: MeasureSequence, mu_v: TorusMeasure, depth: int, samples: int, seed: int
) -> tuple[ChainEnsemble, ChainEnsemble]:
    """Two ensembles whose eta_0 laws agree by the mixture representation.

    A anchors with the law mu_v directly; B draws an anchor value per path
    first and then evolves it deterministically, under an independently
    derived seed.  Any distributional distance between them is pure Monte
    Carlo error.
    """
    cfg_a = ChainConfig(seq, depth, LawAnchor(mu_v), samples, seed)
    cfg_b = ChainConfig(seq, depth, LawAnchor(mu_v), samples, rng.derive_seed(seed, 0xB))
    return simulate(cfg_a), simulate(cfg_b)


@dataclass(frozen=True)
class StrongLimitResult:
    """Truncated strong-solution samples with the analytic truncation bound."""

    samples: np.ndarray
    truncation: int
    tail_variance: float

    def displacement_bound(self, eps: float) -> float:
        """Chebyshev bound on P(|truncation displacement| > eps), via the real lift."""
        return self.tail_variance / (eps * eps)


def _wrapped_variance(mu: TorusMeasure) -> float:
    from .measures import WrappedGaussian, _collapse

    mu = _collapse(mu)
    if isinstance(mu, Dirac):
        return 0.0
    if isinstance(mu, WrappedGaussian):
        return mu.variance
    return math.inf


def truncation_tail_variance(seq: MeasureSequence, truncation: int) -> float:
    """Sum of real-lift noise variances over indexes j < -truncation.

    This is the variance of the displacement a depth-L truncation can still
    accumulate, the quantity behind the Chebyshev truncation bound.  Infinite
    when some deeper law has no wrapped-Gaussian lift.
    """
    total = 0.0
    for j in seq.prefix:
        if j < -truncation:
            total += _wrapped_variance(seq.prefix[j])
    t = min(seq.tail_start, -truncation - 1)
    tail = seq.tail
    if isinstance(tail, WrappedGaussianTail):
        total += tail.variances.sum_upto(t)
    elif isinstance(tail, IidTail):
        v = _wrapped_variance(tail.law)
        total += 0.0 if v == 0.0 else math.inf
    else:
        total = math.inf
    return total


def strong_limit(
    seq: MeasureSequence,
    g: float,
    truncation: int,
    samples: int,
    seed: int,
    *,
    check_regime: bool = True,
) -> StrongLimitResult:
    """Samples of frac(xi_{-L} + ... + xi_0 + g), the depth-L strong solution.

    Requires the strong regime (generator 1).  Noise draws are indexed by
    time, so increasing the truncation under the same seed extends the sum
    pathwise, and the returned Chebyshev tail bound quantifies how far the
    truncated value can sit from the limit.
    """
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    if check_regime and classify(seq).regime is not Regime.STRONG:
        raise NotStrongRegimeError("strong-limit samples need regime C2 (generator 1)")
    acc = np.zeros(samples, dtype=np.float64)
    for k in range(-truncation, 1):
        acc += seq.measure_at(k).sample(samples, seed, stream=rng.STREAM_NOISE, slot=-k)
    return StrongLimitResult(
        samples=frac(acc + g),
        truncation=truncation,
        tail_variance=truncation_tail_variance(seq, truncation),
    )


@dataclass(frozen=True)
class CenteredProductResult:
    """Samples of frac(xi_k + ... + xi_l + alpha_l)."""

    samples: np.ndarray
    k: int
    l: int
    alpha: float
    constructive: bool  # False when no closed-form centering exists (alpha = 0)


def centered_products(
    seq: MeasureSequence, k: int, l: int, samples: int, seed: int
) -> CenteredProductResult:
    """Centered partial sums of the noise between indexes l and k (l < k <= 0).

    Uses the closed-form centering when the family provides one, otherwise
    centers by 0 and flags it.
    """
    if not (l < k <= 0):
        raise ValueError("need l < k <= 0")
    try:
        alpha = centering(seq, l)
        constructive = True
    except NoConstructiveCenteringError:
        alpha = 0.0
        constructive = False
    acc = np.zeros(samples, dtype=np.float64)
    for j in range(l, k + 1):
        acc += seq.measure_at(j).sample(samples, seed, stream=rng.STREAM_NOISE, slot=-j)
    return CenteredProductResult(
        samples=frac(acc + alpha), k=k, l=l, alpha=alpha, constructive=constructive
    )


class HaarConvergence(Enum):
    CONVERGES = "converges to Haar"
    NO_CONVERGENCE = "does not converge"
    UNDETERMINED = "undetermined within n_max"


@dataclass(frozen=True)
class ConvolutionPowerTable:
    """Moduli |fourier(nu, p)|^n for p = 1..p_max, n = 1..n_max.

    A frequency with modulus exactly one keeps its row at 1 forever (the
    support generates a proper closed subgroup), which rules out convergence
    of the convolution powers to Haar measure.
    """

    p_max: int
    n_max: int
    moduli: np.ndarray  # (p_max,) |fourier(nu, p)|
    table: np.ndarray  # (p_max, n_max)
    row_modulus_one: np.ndarray  # (p_max,) bool
    verdict: HaarConvergence

    def row(self, p: int) -> np.ndarray:
        return self.table[p - 1]


DECAY_THRESHOLD = 1e-6


def convolution_power(nu: TorusMeasure, n_max: int, p_max: int) -> ConvolutionPowerTable:
    """Decay table of |fourier(nu, p)|^n and the Haar-convergence verdict."""
    if n_max < 1 or p_max < 1:
        raise ValueError("n_max and p_max must be >= 1")
    moduli = np.array([abs(nu.fourier(p)) for p in range(1, p_max + 1)])
    arith = [arithmetic_structure(nu, p) for p in range(1, p_max + 1)]
    row_modulus_one = np.array([a.modulus_one for a in arith])
    ns = np.arange(1, n_max + 1, dtype=np.float64)
    table = np.minimum(moduli, 1.0)[:, None] ** ns[None, :]
    table[row_modulus_one] = 1.0

    if row_modulus_one.any():
        verdict = HaarConvergence.NO_CONVERGENCE
    else:
        certified_lt1 = all(a.exact and not a.modulus_one for a in arith)
        decayed = bool((table[:, -1] < DECAY_THRESHOLD).all())
        verdict = (
            HaarConvergence.CONVERGES if certified_lt1 or decayed else HaarConvergence.UNDETERMINED
        )
    return ConvolutionPowerTable(
        p_max=p_max,
        n_max=n_max,
        moduli=moduli,
        table=table,
        row_modulus_one=row_modulus_one,
        verdict=verdict,
    )


@dataclass(frozen=True)
class SkeletonConfig:
    """Dyadic-grid skeleton: t_k = 2^k, noise variance 1/(t_{k+1} - t_k) = 2^{-k}."""

    depth: int
    samples: int
    seed: int

    def __post_init__(self):
        if self.depth < 2:
            raise ValueError("depth must be >= 2")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")

    def noise_variance(self, k: int) -> float:
        return 2.0 ** (-k)


@dataclass(eq=False)
class SkeletonEnsemble:
    """Fractional parts of the skeleton chain plus the driving increments.

    ``increments`` column j holds xi_{j-K+1} (the normalized Brownian
    increment over [t_{j-K+1}, t_{j-K+2}]); ``frac_states`` column j holds
    frac(eta_{j-K}) with frac(eta_{-K}) = 0.
    """

    config: SkeletonConfig
    increments: np.ndarray  # (n, K)
    frac_states: np.ndarray  # (n, K+1)

    def increment_at(self, k: int) -> np.ndarray:
        j = k + self.config.depth - 1
        if not 0 <= j < self.config.depth:
            raise IndexError(f"increment index {k} outside [{1 - self.config.depth}, 0]")
        return self.increments[:, j]

    @property
    def eta0(self) -> np.ndarray:
        return self.frac_states[:, -1]


def skeleton(config: SkeletonConfig) -> SkeletonEnsemble:
    """Simulate the skeleton recursion eta_k = xi_k + frac(eta_{k-1}).

    The chain starts from frac(eta_{-K}) = 0 and uses the K increments for
    k = -K+1..0.  The fractional part follows the same mod-1 recursion as the
    measure-driven chains, so it reuses the chain kernel with real-valued
    noise.
    """
    K, n, seed = config.depth, config.samples, config.seed
    rows = np.arange(n)
    increments = np.empty((n, K), dtype=np.float64)
    for k in range(-K + 1, 1):
        sd = math.sqrt(config.noise_variance(k))
        increments[:, k + K - 1] = sd * rng.normals(seed, rng.STREAM_SKELETON, rows, -k)
    frac_states = chain_states(increments, np.zeros(n, dtype=np.float64))
    return SkeletonEnsemble(config=config, increments=increments, frac_states=frac_states)


def window_bias(seq: MeasureSequence, depth: int, p: int, anchor: Anchor) -> float:
    """|ECF of eta_0| implied by the finite window: the truncation bias.

    Zero for a uniform anchor (Haar absorbs); otherwise the product of the
    noise Fourier moduli over the window times the anchor's modulus.
    """
    if isinstance(anchor, UniformAnchor):
        return 0.0
    base = 1.0 if isinstance(anchor, DeterministicAnchor) else abs(anchor.law.fourier(p))
    for k in range(-depth, 1):
        base *= abs(seq.measure_at(k).fourier(p))
        if base == 0.0:
            break
    return base


def cross_character_bias(
    seq: MeasureSequence, depth: int, p: int, q: int, j: int, anchor: Anchor
) -> float:
    """|E[exp(2 i pi (p eta_0 - q xi_j))]| implied by the finite window."""
    if isinstance(anchor, UniformAnchor):
        return 0.0
    base = 1.0 if isinstance(anchor, DeterministicAnchor) else abs(anchor.law.fourier(p))
    for k in range(-depth, 1):
        f = seq.measure_at(k).fourier(p - q) if k == j else seq.measure_at(k).fourier(p)
        base *= abs(f)
        if base == 0.0:
            break
    return base


def exact_cyclic_law(
    seq: MeasureSequence, depth: int, anchor_value, q: int
) -> CyclicDistribution:
    """Ground-truth law of eta_0 on the (1/q)Z grid by exact convolution.

    Requires every noise law in the window and the anchor to live on the
    grid; raises NotOnCyclicGridError otherwise.
    """
    law = to_cyclic(Dirac(anchor_value), q)
    for k in range(-depth, 1):
        law = cyclic_convolve(law, to_cyclic(seq.measure_at(k), q))
    return law


def tv_distance_on_grid(samples: np.ndarray, law: CyclicDistribution) -> float:
    """Total-variation distance between on-grid samples and an exact grid law."""
    q = law.q
    scaled = samples * q
    idx = np.rint(scaled)
    if np.max(np.abs(scaled - idx)) > 1e-6:
        raise NotOnCyclicGridError("samples do not lie on the (1/q)Z grid")
    counts = np.bincount(idx.astype(np.int64) % q, minlength=q)
    emp = counts / len(samples)
    return 0.5 * float(np.abs(emp - law.weights).sum())

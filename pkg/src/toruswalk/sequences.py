"""The evolution law over the infinite negative time axis.

A sequence of noise laws (mu_k) for k <= 0 is represented as a finite prefix
of explicit measures plus a symbolic tail rule.  Restricting the tail to the
declared families is what makes the key query decidable: whether the sum of
-log |fourier(mu_j, p)| over all j <= 0 converges.  Convergence of finitely
many user-supplied terms says nothing about the infinite product, so
arbitrary sequences are rejected by construction.

Tail families:

* ``IidTail(law)`` - one fixed law repeated forever.
* ``WrappedGaussianTail(means, variances)`` - wrapped Gaussian at every
  index, with a symbolic mean rule and a symbolic variance rule whose
  summability is decided in closed form.
* ``ScaledDensityTail(density)`` - mu_j is the law of frac(j * gamma) with
  gamma drawn from a fixed piecewise-constant density; the log-product
  diverges at every frequency (equidistribution by scaling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import zeta

from .measures import (
    Dirac,
    PiecewiseDensity,
    TorusMeasure,
    Uniform,
    WrappedGaussian,
    arithmetic_structure,
)

__all__ = [
    "ZeroMean",
    "ConstantMean",
    "AlternatingMean",
    "GeometricVariance",
    "PowerLawVariance",
    "ConstantVariance",
    "IidTail",
    "WrappedGaussianTail",
    "ScaledDensityTail",
    "MeasureSequence",
    "LogProductStatus",
    "LogProductVerdict",
    "IndexOutOfDomainError",
    "tail_log_product",
    "scaled_pushforward",
]

# Fourier moduli at or below this are treated as zero factors.
ZERO_TOL = 1e-12
# Tolerance-based modulus-one decisions in membership use this gap.
MEMBERSHIP_NEAR_ONE_TOL = 1e-9


class IndexOutOfDomainError(ValueError):
    """Raised for time indexes k > 0, outside the negative time axis."""


# ---------------------------------------------------------------------------
# mean and variance rules for the wrapped-Gaussian tail


@dataclass(frozen=True)
class ZeroMean:
    def at(self, j: int) -> float:
        return 0.0


@dataclass(frozen=True)
class ConstantMean:
    m: float

    def at(self, j: int) -> float:
        return self.m


@dataclass(frozen=True)
class AlternatingMean:
    """Mean +m at even indexes, -m at odd indexes."""

    m: float

    def at(self, j: int) -> float:
        return self.m if j % 2 == 0 else -self.m


@dataclass(frozen=True)
class GeometricVariance:
    """sigma_j^2 = c * r^|j|; always summable."""

    c: float
    r: float

    def __post_init__(self):
        if not (self.c > 0.0 and 0.0 < self.r < 1.0):
            raise ValueError("need c > 0 and 0 < r < 1")

    summable = True

    def at(self, j: int) -> float:
        return self.c * self.r ** abs(j)

    def sum_upto(self, t: int) -> float:
        """Closed form of sum_{j <= t} sigma_j^2 for t <= 0."""
        return self.c * self.r ** abs(t) / (1.0 - self.r)


@dataclass(frozen=True)
class PowerLawVariance:
    """sigma_j^2 = c / |j|^s for j <= -1 (and c at j = 0); summable iff s > 1."""

    c: float
    s: float

    def __post_init__(self):
        if not (self.c > 0.0 and self.s > 0.0):
            raise ValueError("need c > 0 and s > 0")

    @property
    def summable(self) -> bool:
        return self.s > 1.0

    def at(self, j: int) -> float:
        return self.c if j == 0 else self.c / abs(j) ** self.s

    def sum_upto(self, t: int) -> float:
        if not self.summable:
            return math.inf
        if t == 0:
            return self.c + self.c * float(zeta(self.s, 1))
        return self.c * float(zeta(self.s, abs(t)))


@dataclass(frozen=True)
class ConstantVariance:
    """sigma_j^2 = c > 0; never summable."""

    c: float

    def __post_init__(self):
        if not self.c > 0.0:
            raise ValueError("need c > 0")

    summable = False

    def at(self, j: int) -> float:
        return self.c

    def sum_upto(self, t: int) -> float:
        return math.inf


# ---------------------------------------------------------------------------
# tail rules


@dataclass(frozen=True)
class IidTail:
    law: TorusMeasure

    def measure_at(self, j: int) -> TorusMeasure:
        return self.law

    def nonmember_all_p_certificate(self) -> bool:
        """True when non-membership of every p >= 1 is provable symbolically.

        Holds for laws whose Fourier modulus is provably < 1 (or = 0) at every
        nonzero frequency: positive-variance wrapped Gaussians, the uniform
        law, and absolutely continuous piecewise densities.  Atomic laws are
        either arithmetic (some p is a member) or only scannable numerically.
        """
        law = self.law
        if isinstance(law, WrappedGaussian) and law.variance > 0.0:
            return True
        if isinstance(law, (Uniform, PiecewiseDensity)):
            return True
        return False


@dataclass(frozen=True)
class WrappedGaussianTail:
    means: ZeroMean | ConstantMean | AlternatingMean
    variances: GeometricVariance | PowerLawVariance | ConstantVariance

    def measure_at(self, j: int) -> TorusMeasure:
        return WrappedGaussian(self.means.at(j), self.variances.at(j))

    def nonmember_all_p_certificate(self) -> bool:
        return not self.variances.summable


@dataclass(frozen=True)
class ScaledDensityTail:
    density: PiecewiseDensity

    def measure_at(self, j: int) -> TorusMeasure:
        return scaled_pushforward(self.density, j)

    def nonmember_all_p_certificate(self) -> bool:
        # |fourier(frac(j*gamma), p)| = |phi_gamma(j*p)| <= C/(|j| p) -> 0,
        # so -log terms exceed log 2 for infinitely many j at every p.
        return True


TailRule = IidTail | WrappedGaussianTail | ScaledDensityTail


def scaled_pushforward(density: PiecewiseDensity, a: int) -> TorusMeasure:
    """Exact law of frac(a * gamma) for gamma ~ density and integer a.

    For a > 0 the density is h(y) = (1/a) sum_{m < a} d((y + m)/a); negative a
    reflects the result; a = 0 collapses to the point mass at 0.
    """
    if a == 0:
        return Dirac(0.0)
    d = density
    if a < 0:
        d = _reflect(d)
        a = -a
    if a == 1:
        return d
    new_breaks = np.unique(np.concatenate([[0.0, 1.0], (d.breaks[:-1] * a) % 1.0]))
    mids = (new_breaks[:-1] + new_breaks[1:]) / 2.0
    dens = np.array([
        sum(d.density_at((y + m) / a) for m in range(a)) / a for y in mids
    ])
    return PiecewiseDensity(new_breaks, dens)


def _reflect(d: PiecewiseDensity) -> PiecewiseDensity:
    """Law of frac(-gamma): flip the partition around the circle."""
    inner = 1.0 - d.breaks[-2:0:-1]
    breaks = np.concatenate([[0.0], inner, [1.0]])
    dens = d.densities[::-1]
    return PiecewiseDensity(breaks, dens)


# ---------------------------------------------------------------------------
# the sequence and its log-product query


class MeasureSequence:
    """Noise laws mu_k for all k <= 0: explicit prefix plus symbolic tail.

    ``prefix`` maps k in {-K, ..., 0} to a measure (it may be empty, in which
    case the tail covers every index); ``tail`` applies to all k below the
    prefix.
    """

    def __init__(self, tail: TailRule, prefix: dict[int, TorusMeasure] | None = None):
        self.tail = tail
        self.prefix = dict(prefix) if prefix else {}
        if self.prefix:
            keys = sorted(self.prefix)
            if keys[-1] != 0 or keys != list(range(keys[0], 1)):
                raise ValueError("prefix keys must be exactly {-K, ..., 0}")
        self.tail_start = min(self.prefix, default=1) - 1

    def __repr__(self):
        return f"MeasureSequence(tail={self.tail!r}, prefix={self.prefix!r})"

    def measure_at(self, k: int) -> TorusMeasure:
        """The law of the noise at time k <= 0."""
        if k > 0:
            raise IndexOutOfDomainError(f"time index {k} > 0")
        if k in self.prefix:
            return self.prefix[k]
        return self.tail.measure_at(k)


class LogProductStatus(Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    INFINITELY_MANY_ZERO_FACTORS = "infinitely_many_zero_factors"


@dataclass(frozen=True)
class LogProductVerdict:
    """Convergence verdict for sum_{j <= 0} -log |fourier(mu_j, p)|.

    ``tail_log_sum`` and ``zero_factor_count`` are populated for FINITE: the
    total log sum (prefix terms numerically, tail in closed form) and the
    number of prefix indexes whose Fourier coefficient vanishes.  Finitely
    many zero factors never affect the verdict because positivity is only
    required from some index on.  ``certified`` is True when the FINITE /
    not-FINITE decision used exact or symbolic reasoning only.
    """

    status: LogProductStatus
    tail_log_sum: float | None
    zero_factor_count: int | None
    certified: bool

    @property
    def finite(self) -> bool:
        return self.status is LogProductStatus.FINITE


def tail_log_product(seq: MeasureSequence, p: int) -> LogProductVerdict:
    """Decide convergence of the Fourier log-product at frequency p >= 1."""
    if p < 1:
        raise ValueError("p must be >= 1")

    log_sum = 0.0
    zero_count = 0
    for k in sorted(seq.prefix):
        m = abs(seq.prefix[k].fourier(p))
        if m <= ZERO_TOL:
            zero_count += 1
        else:
            log_sum += -math.log(min(m, 1.0))

    tail = seq.tail
    if isinstance(tail, IidTail):
        arith = arithmetic_structure(tail.law, p, near_one_tol=MEMBERSHIP_NEAR_ONE_TOL)
        if arith.modulus_one:
            return LogProductVerdict(LogProductStatus.FINITE, log_sum, zero_count, arith.exact)
        if abs(tail.law.fourier(p)) <= ZERO_TOL:
            return LogProductVerdict(
                LogProductStatus.INFINITELY_MANY_ZERO_FACTORS, None, None, arith.exact
            )
        return LogProductVerdict(LogProductStatus.INFINITE, None, None, arith.exact)

    if isinstance(tail, WrappedGaussianTail):
        if tail.variances.summable:
            var_sum = tail.variances.sum_upto(seq.tail_start)
            tail_sum = 2.0 * math.pi**2 * p * p * var_sum
            return LogProductVerdict(LogProductStatus.FINITE, log_sum + tail_sum, zero_count, True)
        return LogProductVerdict(LogProductStatus.INFINITE, None, None, True)

    if isinstance(tail, ScaledDensityTail):
        return LogProductVerdict(LogProductStatus.INFINITE, None, None, True)

    raise TypeError(f"unknown tail rule {type(tail).__name__}")

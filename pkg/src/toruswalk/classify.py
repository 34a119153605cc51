"""Trichotomy of the circle recursion from the Fourier data of the noise laws.

For each frequency p >= 1, call p *persistent* when the infinite product of
Fourier-coefficient moduli of the noise laws stays positive from some index
on.  The persistent frequencies (with 0 adjoined) form a subgroup of the
integers, hence equal g * Z for a unique generator g >= 0, and g decides
everything:

* g = 0: the solution law is unique (and is the Haar-anchored one); no
  strong solution exists.
* g = 1: strong solutions exist and uniqueness fails; each extremal solution
  is the a.s. limit of centered partial sums.
* g >= 2: neither holds; solutions are measurable only through frac(g * eta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .measures import Dirac, _collapse
from .sequences import (
    IidTail,
    LogProductVerdict,
    MeasureSequence,
    WrappedGaussianTail,
    tail_log_product,
)
from .torus import frac_scalar

__all__ = [
    "Regime",
    "SubgroupScan",
    "CenteringSpec",
    "TrichotomyResult",
    "SubgroupViolationError",
    "NoConstructiveCenteringError",
    "persists",
    "scan_subgroup",
    "classify",
    "centering",
    "DEFAULT_SCAN_BOUND",
]

DEFAULT_SCAN_BOUND = 64

# Circular-mean moduli below this give no usable mean direction.
MEAN_DIRECTION_TOL = 1e-12


class SubgroupViolationError(RuntimeError):
    """Scanned persistent frequencies fail subgroup closure: a tolerance bug."""


class NoConstructiveCenteringError(ValueError):
    """No closed-form centering sequence exists for this noise family."""


class Regime(Enum):
    """The three possible answers, labeled as in the classification table."""

    UNIQUENESS = "C1"  # unique solution law, not strong
    STRONG = "C2"  # strong solutions exist, uniqueness fails
    NEITHER = "C3"  # neither uniqueness nor a strong solution

    def __str__(self):
        return self.value


def persists(seq: MeasureSequence, p: int) -> tuple[bool, LogProductVerdict]:
    """Whether frequency p is persistent, with the log-product evidence.

    True exactly when the log-product verdict is finite: finitely many zero
    factors and a convergent sum of -log moduli.
    """
    verdict = tail_log_product(seq, p)
    return verdict.finite, verdict


@dataclass(frozen=True)
class SubgroupScan:
    """Persistent frequencies in {1, ..., scan_bound} and the generator they pin down.

    ``generator`` is the smallest member (0 when no member was found).
    ``fully_certified`` is the conjunction of the per-frequency certifications;
    ``conclusion_certified`` states whether the generator value is proven for
    *all* frequencies, not just the scanned range (via symbolic tail
    certificates for generator 0, via subgroup closure over certified
    divisors for generator >= 1).
    """

    scan_bound: int
    members: tuple[int, ...]
    generator: int
    per_p: dict[int, LogProductVerdict]
    fully_certified: bool
    conclusion_certified: bool


def scan_subgroup(seq: MeasureSequence, scan_bound: int = DEFAULT_SCAN_BOUND) -> SubgroupScan:
    """Evaluate persistence for p in {1, ..., scan_bound} and check closure."""
    if scan_bound < 1:
        raise ValueError("scan_bound must be >= 1")
    per_p: dict[int, LogProductVerdict] = {}
    members: list[int] = []
    for p in range(1, scan_bound + 1):
        member, verdict = persists(seq, p)
        per_p[p] = verdict
        if member:
            members.append(p)

    generator = members[0] if members else 0
    if members:
        expected = list(range(generator, scan_bound + 1, generator))
        if members != expected:
            raise SubgroupViolationError(
                f"persistent frequencies {members} are not the multiples of "
                f"{generator} within {scan_bound}; numerical tolerance bug"
            )

    fully_certified = all(v.certified for v in per_p.values())
    if generator == 0:
        conclusion_certified = seq.tail.nonmember_all_p_certificate()
    else:
        divisors = [d for d in range(1, generator) if generator % d == 0]
        conclusion_certified = per_p[generator].certified and all(
            per_p[d].certified for d in divisors
        )
    return SubgroupScan(
        scan_bound=scan_bound,
        members=tuple(members),
        generator=generator,
        per_p=per_p,
        fully_certified=fully_certified,
        conclusion_certified=conclusion_certified,
    )


@dataclass(frozen=True)
class CenteringSpec:
    """Closed-form centering sequence l -> alpha_l for the strong regime."""

    alpha: Callable[[int], float]
    family: str

    def __call__(self, l: int) -> float:
        return self.alpha(l)


@dataclass(frozen=True)
class TrichotomyResult:
    """Regime verdict; a pure function of the scan's generator (0 / 1 / >= 2)."""

    regime: Regime
    generator: int
    evidence: SubgroupScan
    centering: CenteringSpec | None  # populated in the strong regime when constructive


def classify(seq: MeasureSequence, scan_bound: int = DEFAULT_SCAN_BOUND) -> TrichotomyResult:
    """Map the subgroup generator through the trichotomy."""
    evidence = scan_subgroup(seq, scan_bound)
    g = evidence.generator
    if g == 0:
        return TrichotomyResult(Regime.UNIQUENESS, 0, evidence, None)
    if g == 1:
        spec = None
        try:
            centering(seq, seq.tail_start)  # probe constructibility across the prefix
            family = (
                "wrapped-gaussian means"
                if isinstance(seq.tail, WrappedGaussianTail)
                else "iid point mass"
            )
            spec = CenteringSpec(alpha=lambda l: centering(seq, l), family=family)
        except NoConstructiveCenteringError:
            spec = None
        return TrichotomyResult(Regime.STRONG, 1, evidence, spec)
    return TrichotomyResult(Regime.NEITHER, g, evidence, None)


def _mean_direction(mu) -> float:
    """Argument of E[exp(2 i pi theta)] / 2 pi, the canonical circle mean."""
    z = mu.fourier(1)
    if abs(z) <= MEAN_DIRECTION_TOL:
        raise NoConstructiveCenteringError(
            f"{type(mu).__name__} has vanishing mean direction; no canonical centering"
        )
    return frac_scalar(float(np.angle(z)) / (2.0 * math.pi))


def centering(seq: MeasureSequence, l: int) -> float:
    """The centering point alpha_l = frac(-sum of the means for l <= j <= 0).

    Supported for wrapped-Gaussian tails (symbolic means) and iid point-mass
    tails; prefix measures contribute their circle mean direction.  Raises
    NoConstructiveCenteringError for other iid laws: convergence of centered
    products is an existence statement there, with no closed-form sequence.
    """
    if l > 0:
        raise ValueError("l must be <= 0")
    tail = seq.tail
    if isinstance(tail, IidTail):
        law = _collapse(tail.law)
        if not isinstance(law, Dirac):
            raise NoConstructiveCenteringError(
                "iid tails admit a constructive centering only for point masses"
            )
        tail_mean = law.x
    elif isinstance(tail, WrappedGaussianTail):
        tail_mean = None  # use the mean rule per index
    else:
        raise NoConstructiveCenteringError(
            f"{type(tail).__name__} has no constructive centering"
        )

    total = 0.0
    for j in range(l, 1):
        if j in seq.prefix:
            total += _mean_direction(seq.prefix[j])
        elif tail_mean is not None:
            total += tail_mean
        else:
            total += tail.means.at(j)
    return frac_scalar(-total)

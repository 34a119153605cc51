"""Closed-form probability measures on the circle [0, 1).

Five families are supported: point masses, finite atom sets, wrapped
Gaussians, the uniform (Haar) law and piecewise-constant densities.  Each
knows its exact Fourier coefficients ``E[exp(2 i pi p theta)]``, can be
sampled deterministically through the counter RNG, and participates in
closed-form convolution where the pair of families permits it.

Atom locations may carry an exact rational tag (``fractions.Fraction``).
Whether a nonzero Fourier coefficient has modulus exactly one is decidable
only for such tagged locations; everywhere else a tolerance is used and the
answer is flagged as not exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import rng
from ._kernels import cyclic_convolve_weights
from .torus import frac, frac_scalar

__all__ = [
    "TorusMeasure",
    "Dirac",
    "Atoms",
    "WrappedGaussian",
    "Uniform",
    "PiecewiseDensity",
    "CyclicDistribution",
    "ArithmeticStructure",
    "IncompatiblePairError",
    "NotOnCyclicGridError",
    "convolve",
    "arithmetic_structure",
    "to_cyclic",
    "cyclic_convolve",
    "parse_location",
]

TWO_PI = 2.0 * math.pi

# Weight/integral normalization tolerance and atom-merging tolerance.
WEIGHT_TOL = 1e-12
MERGE_TOL = 1e-12
# |fourier| >= 1 - NEAR_ONE_TOL counts as modulus one when not exactly decidable.
NEAR_ONE_TOL = 1e-12


class IncompatiblePairError(ValueError):
    """Raised when two measures have no closed-form convolution."""


class NotOnCyclicGridError(ValueError):
    """Raised when a measure has an atom off the requested cyclic grid."""


def parse_location(value) -> tuple[float, Fraction | None]:
    """Normalize a point of the circle to (float in [0,1), optional exact rational).

    Strings and Fractions are exact: ``"1/3"`` keeps its full arithmetic
    identity, ``"0.5"`` parses as the rational 1/2.  Plain floats stay floats.
    """
    if isinstance(value, Fraction):
        ex = value % 1
        return float(ex), ex
    if isinstance(value, str):
        ex = Fraction(value) % 1
        return float(ex), ex
    if isinstance(value, (int, np.integer)):
        return 0.0, Fraction(0)
    f = frac_scalar(float(value))
    return f, None


def _as_weight(value) -> float:
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


class TorusMeasure:
    """Base class for circle laws with exact Fourier data."""

    def fourier(self, p: int) -> complex:
        """Fourier coefficient ``E[exp(2 i pi p theta)]``; exactly 1 at p = 0."""
        raise NotImplementedError

    def sample(self, n: int, seed: int, stream: int = rng.STREAM_GENERIC, slot: int = 0) -> np.ndarray:
        """n deterministic draws on [0, 1); pure function of (seed, stream, slot)."""
        raise NotImplementedError


class Dirac(TorusMeasure):
    """Point mass at x (mod 1)."""

    def __init__(self, x):
        self.x, self.exact = parse_location(x)

    def __repr__(self):
        return f"Dirac({self.exact if self.exact is not None else self.x})"

    def __eq__(self, other):
        return isinstance(other, Dirac) and other.x == self.x

    def fourier(self, p: int) -> complex:
        if p == 0:
            return complex(1.0)
        return complex(np.exp(2j * math.pi * p * self.x))

    def sample(self, n, seed, stream=rng.STREAM_GENERIC, slot=0):
        return np.full(n, self.x, dtype=np.float64)


class Atoms(TorusMeasure):
    """Finitely many atoms: list of (location, weight) pairs.

    Weights must be positive and sum to 1; locations must be distinct mod 1.
    Locations given as strings or Fractions are tagged exact.
    """

    def __init__(self, points):
        locs, weights, exacts = [], [], []
        for loc, w in points:
            f, ex = parse_location(loc)
            locs.append(f)
            exacts.append(ex)
            weights.append(_as_weight(w))
        self.locations = np.asarray(locs, dtype=np.float64)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.exact = tuple(exacts)
        if len(self.locations) == 0:
            raise ValueError("Atoms needs at least one point")
        if np.any(self.weights <= 0.0):
            raise ValueError("atom weights must be positive")
        if abs(self.weights.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"atom weights sum to {self.weights.sum()}, expected 1")
        if len(np.unique(self.locations)) != len(self.locations):
            raise ValueError("atom locations must be distinct mod 1")
        self._cum = np.cumsum(self.weights)
        self._cum[-1] = 1.0

    def __repr__(self):
        pts = ", ".join(
            f"({ex if ex is not None else loc}, {w})"
            for loc, w, ex in zip(self.locations, self.weights, self.exact)
        )
        return f"Atoms([{pts}])"

    @property
    def all_exact(self) -> bool:
        return all(ex is not None for ex in self.exact)

    def fourier(self, p: int) -> complex:
        if p == 0:
            return complex(1.0)
        return complex(np.sum(self.weights * np.exp(2j * math.pi * p * self.locations)))

    def sample(self, n, seed, stream=rng.STREAM_GENERIC, slot=0):
        u = rng.uniforms(seed, stream, np.arange(n), 2 * slot)
        idx = np.searchsorted(self._cum, u, side="right")
        return self.locations[idx]


class WrappedGaussian(TorusMeasure):
    """A real N(mean, variance) reduced mod 1.

    Fourier coefficient exp(2 i pi p mean) * exp(-2 pi^2 p^2 variance).
    Variance 0 behaves as the point mass at frac(mean) throughout.
    """

    def __init__(self, mean: float, variance: float):
        if variance < 0.0:
            raise ValueError("variance must be nonnegative")
        self.mean = float(mean)
        self.variance = float(variance)

    def __repr__(self):
        return f"WrappedGaussian({self.mean}, {self.variance})"

    def __eq__(self, other):
        return (
            isinstance(other, WrappedGaussian)
            and other.mean == self.mean
            and other.variance == self.variance
        )

    def fourier(self, p: int) -> complex:
        if p == 0:
            return complex(1.0)
        return complex(
            np.exp(2j * math.pi * p * self.mean) * math.exp(-2.0 * math.pi**2 * p * p * self.variance)
        )

    def sample(self, n, seed, stream=rng.STREAM_GENERIC, slot=0):
        z = rng.normals(seed, stream, np.arange(n), slot)
        return frac(self.mean + math.sqrt(self.variance) * z)


class Uniform(TorusMeasure):
    """Haar measure on the circle; absorbing under convolution."""

    def __repr__(self):
        return "Uniform()"

    def __eq__(self, other):
        return isinstance(other, Uniform)

    def fourier(self, p: int) -> complex:
        return complex(1.0) if p == 0 else complex(0.0)

    def sample(self, n, seed, stream=rng.STREAM_GENERIC, slot=0):
        return rng.uniforms(seed, stream, np.arange(n), 2 * slot)


class PiecewiseDensity(TorusMeasure):
    """Piecewise-constant density on [0, 1).

    ``breaks`` is the full partition 0 = b_0 < ... < b_m = 1 and
    ``densities[i]`` the constant value on [b_i, b_{i+1}).  The density must
    integrate to 1 within 1e-12.
    """

    def __init__(self, breaks, densities):
        self.breaks = np.asarray(breaks, dtype=np.float64)
        self.densities = np.asarray(densities, dtype=np.float64)
        if len(self.breaks) != len(self.densities) + 1:
            raise ValueError("need len(breaks) == len(densities) + 1")
        if self.breaks[0] != 0.0 or self.breaks[-1] != 1.0:
            raise ValueError("breaks must start at 0 and end at 1")
        if np.any(np.diff(self.breaks) <= 0.0):
            raise ValueError("breaks must be strictly increasing")
        if np.any(self.densities < 0.0):
            raise ValueError("densities must be nonnegative")
        integral = float(np.sum(self.densities * np.diff(self.breaks)))
        if abs(integral - 1.0) > WEIGHT_TOL:
            raise ValueError(f"density integrates to {integral}, expected 1")
        masses = self.densities * np.diff(self.breaks)
        self._cum = np.cumsum(masses)
        self._cum[-1] = 1.0

    def __repr__(self):
        return f"PiecewiseDensity({self.breaks.tolist()}, {self.densities.tolist()})"

    def density_at(self, y: float) -> float:
        idx = int(np.searchsorted(self.breaks, y, side="right")) - 1
        idx = min(max(idx, 0), len(self.densities) - 1)
        return float(self.densities[idx])

    def fourier(self, p: int) -> complex:
        if p == 0:
            return complex(1.0)
        # integral of d_i * e^{2 i pi p x} over each piece, summed
        z = np.exp(2j * math.pi * p * self.breaks)
        coeff = (z[1:] - z[:-1]) / (2j * math.pi * p)
        return complex(np.sum(self.densities * coeff))

    def sample(self, n, seed, stream=rng.STREAM_GENERIC, slot=0):
        u = rng.uniforms(seed, stream, np.arange(n), 2 * slot)
        idx = np.searchsorted(self._cum, u, side="right")
        idx = np.minimum(idx, len(self.densities) - 1)
        cum_before = np.concatenate([[0.0], self._cum[:-1]])
        x = self.breaks[idx] + (u - cum_before[idx]) / self.densities[idx]
        return frac(x)


@dataclass(frozen=True)
class ArithmeticStructure:
    """Answer to: does |fourier(mu, p)| equal 1 (support on a coset of (1/p)Z)?

    ``exact`` records whether the decision came from exact rational reasoning
    or from the modulus tolerance.
    """

    modulus_one: bool
    phase: float | None
    exact: bool


@dataclass(frozen=True)
class CyclicDistribution:
    """Exact distribution on the grid {0, 1/q, ..., (q-1)/q}."""

    q: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        if len(w) != self.q:
            raise ValueError("weights length must equal q")
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {w.sum()}, expected 1")


def _collapse(mu: TorusMeasure) -> TorusMeasure:
    """Zero-variance wrapped Gaussians behave as point masses everywhere."""
    if isinstance(mu, WrappedGaussian) and mu.variance == 0.0:
        return Dirac(frac_scalar(mu.mean))
    return mu


def _shift_by_dirac(mu: TorusMeasure, d: Dirac) -> TorusMeasure:
    """Law of (theta + x) mod 1 for theta ~ mu and the constant x of d."""
    if isinstance(mu, Dirac):
        if d.exact is not None and mu.exact is not None:
            return Dirac(d.exact + mu.exact)
        return Dirac(frac_scalar(mu.x + d.x))
    if isinstance(mu, Atoms):
        pts = []
        for loc, w, ex in zip(mu.locations, mu.weights, mu.exact):
            if d.exact is not None and ex is not None:
                pts.append((d.exact + ex, w))
            else:
                pts.append((frac_scalar(loc + d.x), w))
        return Atoms(pts)
    if isinstance(mu, WrappedGaussian):
        return WrappedGaussian(frac_scalar(mu.mean + d.x), mu.variance)
    if isinstance(mu, Uniform):
        return Uniform()
    if isinstance(mu, PiecewiseDensity):
        pts = frac(mu.breaks[:-1] + d.x)
        new_breaks = np.unique(np.concatenate([[0.0, 1.0], pts]))
        mids = (new_breaks[:-1] + new_breaks[1:]) / 2.0
        new_dens = np.array([mu.density_at(frac_scalar(m - d.x)) for m in mids])
        return PiecewiseDensity(new_breaks, new_dens)
    raise IncompatiblePairError(f"cannot shift {type(mu).__name__}")


def _merge_atoms(locs, weights, exacts) -> Atoms:
    """Merge atom locations within MERGE_TOL (circularly) and rebuild."""
    order = np.argsort(locs, kind="stable")
    locs = locs[order]
    weights = weights[order]
    exacts = [exacts[i] for i in order]

    clusters: list[list[int]] = [[0]]
    for i in range(1, len(locs)):
        if locs[i] - locs[clusters[-1][-1]] <= MERGE_TOL:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    # wrap-around: a cluster hugging 1 merges with one hugging 0
    if len(clusters) > 1 and (locs[clusters[0][0]] + 1.0 - locs[clusters[-1][-1]]) <= MERGE_TOL:
        clusters[0] = clusters.pop() + clusters[0]

    pts = []
    for members in clusters:
        w = float(np.sum(weights[members]))
        rep = max(members, key=lambda i: weights[i])
        ex = exacts[rep]
        pts.append((ex if ex is not None else float(locs[rep]), w))
    return Atoms(pts)


def convolve(a: TorusMeasure, b: TorusMeasure) -> TorusMeasure:
    """Law of the sum mod 1 of independent draws from a and b.

    Supported pairs: Uniform * anything (Haar absorbs), Dirac * anything,
    WrappedGaussian * WrappedGaussian (means add mod 1, variances add) and
    Atoms * Atoms (atomwise with weight products, merging within 1e-12).
    Raises IncompatiblePairError otherwise; callers then fall back to
    Fourier-domain or Monte Carlo comparison.
    """
    a = _collapse(a)
    b = _collapse(b)
    if isinstance(a, Uniform) or isinstance(b, Uniform):
        return Uniform()
    if isinstance(a, Dirac):
        return _shift_by_dirac(b, a)
    if isinstance(b, Dirac):
        return _shift_by_dirac(a, b)
    if isinstance(a, WrappedGaussian) and isinstance(b, WrappedGaussian):
        return WrappedGaussian(frac_scalar(a.mean + b.mean), a.variance + b.variance)
    if isinstance(a, Atoms) and isinstance(b, Atoms):
        locs = frac(a.locations[:, None] + b.locations[None, :]).ravel()
        wts = (a.weights[:, None] * b.weights[None, :]).ravel()
        exacts = []
        for ea in a.exact:
            for eb in b.exact:
                exacts.append((ea + eb) % 1 if ea is not None and eb is not None else None)
        return _merge_atoms(locs, wts, exacts)
    raise IncompatiblePairError(
        f"no closed-form convolution for {type(a).__name__} * {type(b).__name__}"
    )


def arithmetic_structure(mu: TorusMeasure, p: int, near_one_tol: float = NEAR_ONE_TOL) -> ArithmeticStructure:
    """Decide whether mu is supported on a coset of the subgroup (1/p)Z.

    Equivalent to |fourier(mu, p)| = 1.  Exact for point masses, rationally
    tagged atoms, wrapped Gaussians, uniform and piecewise densities; decided
    by ``near_one_tol`` on the modulus for untagged atom locations.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    mu = _collapse(mu)
    if isinstance(mu, Dirac):
        if mu.exact is not None:
            return ArithmeticStructure(True, float((p * mu.exact) % 1), True)
        return ArithmeticStructure(True, frac_scalar(p * mu.x), True)
    if isinstance(mu, Atoms):
        if mu.all_exact:
            base = mu.exact[0]
            on_coset = all((p * (ex - base)).denominator == 1 for ex in mu.exact)
            if on_coset:
                return ArithmeticStructure(True, float((p * base) % 1), True)
            return ArithmeticStructure(False, None, True)
        val = mu.fourier(p)
        if abs(val) >= 1.0 - near_one_tol:
            return ArithmeticStructure(True, frac_scalar(np.angle(val) / TWO_PI), False)
        return ArithmeticStructure(False, None, False)
    if isinstance(mu, WrappedGaussian):
        # variance > 0 after collapse: modulus e^{-2 pi^2 p^2 var} < 1
        return ArithmeticStructure(False, None, True)
    if isinstance(mu, Uniform):
        return ArithmeticStructure(False, None, True)
    if isinstance(mu, PiecewiseDensity):
        # an absolutely continuous law is never supported on a finite coset
        return ArithmeticStructure(False, None, True)
    raise TypeError(f"unknown measure {type(mu).__name__}")


def _grid_index(loc: float, ex: Fraction | None, q: int) -> int:
    if ex is not None:
        if q % ex.denominator != 0:
            raise NotOnCyclicGridError(f"atom at {ex} is not on the (1/{q})Z grid")
        return (ex.numerator * (q // ex.denominator)) % q
    v = loc * q
    r = round(v)
    if v != r or float(r) / q != loc:
        raise NotOnCyclicGridError(
            f"atom at {loc!r} is not exactly on the (1/{q})Z grid; "
            "tag the location as an exact rational"
        )
    return int(r) % q


def to_cyclic(mu: TorusMeasure, q: int) -> CyclicDistribution:
    """Exact pushforward of an atomic measure onto the grid {j/q}.

    Every atom must lie exactly on the grid: either tagged with a rational
    whose denominator divides q, or a float that is bitwise equal to some j/q.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    mu = _collapse(mu)
    w = np.zeros(q, dtype=np.float64)
    if isinstance(mu, Dirac):
        w[_grid_index(mu.x, mu.exact, q)] = 1.0
        return CyclicDistribution(q, w)
    if isinstance(mu, Atoms):
        for loc, wt, ex in zip(mu.locations, mu.weights, mu.exact):
            w[_grid_index(loc, ex, q)] += wt
        return CyclicDistribution(q, w)
    raise NotOnCyclicGridError(f"{type(mu).__name__} is not an atomic measure on a cyclic grid")


def cyclic_convolve(a: CyclicDistribution, b: CyclicDistribution) -> CyclicDistribution:
    """Circular convolution of two grid distributions of the same order."""
    if a.q != b.q:
        raise ValueError(f"grid orders differ: {a.q} != {b.q}")
    return CyclicDistribution(a.q, cyclic_convolve_weights(a.weights, b.weights))

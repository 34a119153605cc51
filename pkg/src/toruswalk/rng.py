"""Counter-based deterministic random numbers.

Every draw is a pure function of ``(seed, stream, i, j)`` where ``i`` is the
sample index and ``j`` the draw slot.  There is no generator state: any draw
can be produced independently of any other, in any order, on any number of
workers, and always yields the same value.  This is what makes simulations
reproducible under parallel execution and lets two runs at different depths
share the noise they have in common.

The word function is three rounds of the SplitMix64 finalizer (Stafford mix13)
chained over seed, stream, i and j.  Each round is a bijection on 64-bit words
with full avalanche, which is the standard construction for hash-based
counter RNGs.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "uniforms",
    "normals",
    "derive_seed",
    "STREAM_NOISE",
    "STREAM_ANCHOR",
    "STREAM_SKELETON",
    "STREAM_GENERIC",
]

# Stream tags keep draws for different purposes on disjoint substreams.
STREAM_NOISE = 0x01
STREAM_ANCHOR = 0x02
STREAM_SKELETON = 0x03
STREAM_GENERIC = 0x04

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

_TWO_PI = 2.0 * np.pi


def _mix(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer, vectorized over uint64 arrays."""
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _words(seed: int, stream: int, i, j) -> np.ndarray:
    """64-bit word for each counter pair (i, j), fully avalanched."""
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h = _mix(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + _GAMMA * np.uint64(stream))
        h = _mix(h + _GAMMA * i)
        h = _mix(h + _GAMMA * j)
    return h


def uniforms(seed: int, stream: int, i, j) -> np.ndarray:
    """Uniform draws in [0, 1), one per counter pair (i, j).

    ``i`` and ``j`` broadcast against each other; the result has the broadcast
    shape and dtype float64 (53 significant bits per draw).
    """
    w = _words(seed, stream, i, j)
    return (w >> np.uint64(11)).astype(np.float64) * (2.0**-53)


def normals(seed: int, stream: int, i, j) -> np.ndarray:
    """Standard normal draws via Box-Muller, one per counter pair (i, j).

    Consumes the two uniform slots (i, 2j) and (i, 2j + 1), so callers that
    mix ``uniforms`` and ``normals`` on one stream must keep slots disjoint.
    """
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    with np.errstate(over="ignore"):
        j2 = j * np.uint64(2)
        u1 = uniforms(seed, stream, i, j2)
        u2 = uniforms(seed, stream, i, j2 + np.uint64(1))
    r = np.sqrt(-2.0 * np.log1p(-u1))
    return r * np.cos(_TWO_PI * u2)


def derive_seed(seed: int, salt: int) -> int:
    """Deterministically derive an independent seed (e.g. for paired runs)."""
    with np.errstate(over="ignore"):
        w = _mix(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ _mix(np.uint64(salt & 0xFFFFFFFFFFFFFFFF) + _GAMMA))
    return int(w)

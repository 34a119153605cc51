"""Hot numeric kernels: numba-compiled with a pure-numpy fallback.

The chain recursion is the only part of the package where work is sequential
in time per sample, so it is the part that benefits from compilation.  The
numba path parallelizes over samples (rows); every row is independent, which
keeps results bit-identical no matter the thread count.  The numpy fallback
loops over time steps with vectorized row operations, performing the exact
same elementwise arithmetic, so the two backends agree bit for bit.

Backend selection: set ``TORUSWALK_NUMBA=0`` to force the numpy path.  The
numpy path is also used automatically when numba is not importable.
``TORUSWALK_WORKERS`` bounds the numba thread count (speed only, never
results).
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "chain_states",
    "chain_states_numpy",
    "cyclic_convolve_weights",
    "cyclic_convolve_weights_numpy",
]

_FLAG = os.environ.get("TORUSWALK_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "false", "off", "no")

_numba = None
if _WANT_NUMBA:
    try:
        import numba as _numba
    except ImportError:
        _numba = None

if _numba is not None:
    _workers = os.environ.get("TORUSWALK_WORKERS", "").strip()
    if _workers:
        try:
            _numba.set_num_threads(max(1, min(int(_workers), _numba.config.NUMBA_NUM_THREADS)))
        except ValueError:
            pass


def chain_states_numpy(noise: np.ndarray, anchors: np.ndarray) -> np.ndarray:
    """Iterate states[:, k+1] = frac(states[:, k] + noise[:, k]) from anchors.

    noise: (n, m) float64, any real values.  anchors: (n,) float64 in [0, 1).
    Returns (n, m+1) float64 states in [0, 1).
    """
    n, m = noise.shape
    states = np.empty((n, m + 1), dtype=np.float64)
    states[:, 0] = anchors
    for k in range(m):
        s = states[:, k] + noise[:, k]
        f = s - np.floor(s)
        f[f >= 1.0] -= 1.0
        states[:, k + 1] = f
    return states


def cyclic_convolve_weights_numpy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Circular convolution of two weight vectors of equal length."""
    q = a.shape[0]
    out = np.zeros(q, dtype=np.float64)
    for i in range(q):
        out += a[i] * np.roll(b, i)
    return out


if _numba is not None:
    from numba import prange as _prange

    @_numba.njit(parallel=True, cache=True)
    def _chain_states_nb(noise, anchors):  # pragma: no cover - exercised via wrapper
        n, m = noise.shape
        states = np.empty((n, m + 1), dtype=np.float64)
        for row in _prange(n):
            s = anchors[row]
            states[row, 0] = s
            for k in range(m):
                t = s + noise[row, k]
                f = t - np.floor(t)
                if f >= 1.0:
                    f -= 1.0
                states[row, k + 1] = f
                s = f
        return states

    @_numba.njit(cache=True)
    def _cyclic_convolve_nb(a, b):  # pragma: no cover - exercised via wrapper
        q = a.shape[0]
        out = np.zeros(q, dtype=np.float64)
        for i in range(q):
            w = a[i]
            for k in range(q):
                out[k] += w * b[(k - i) % q]
        return out

    def chain_states_numba(noise: np.ndarray, anchors: np.ndarray) -> np.ndarray:
        return _chain_states_nb(
            np.ascontiguousarray(noise, dtype=np.float64),
            np.ascontiguousarray(anchors, dtype=np.float64),
        )

    def cyclic_convolve_weights_numba(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return _cyclic_convolve_nb(
            np.ascontiguousarray(a, dtype=np.float64),
            np.ascontiguousarray(b, dtype=np.float64),
        )

    BACKEND = "numba"
    chain_states = chain_states_numba
    cyclic_convolve_weights = cyclic_convolve_weights_numba
else:
    BACKEND = "numpy"
    chain_states = chain_states_numpy
    cyclic_convolve_weights = cyclic_convolve_weights_numpy

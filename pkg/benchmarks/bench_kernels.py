"""Benchmark the numba kernels against the pure-numpy fallback.

Run: python benchmarks/bench_kernels.py [--samples N] [--depth M]

The chain recursion is sequential in time per sample, which is where the
compiled kernel earns its keep; the cyclic convolution is a dense O(q^2)
loop.  Both backends must agree bit for bit, which this script also checks.
"""

import argparse
import time

import numpy as np

from toruswalk import _kernels as K
from toruswalk import rng


def timeit(fn, *args, repeats=5):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--depth", type=int, default=64)
    ap.add_argument("--q", type=int, default=2048)
    args = ap.parse_args()

    n, m = args.samples, args.depth
    rows = np.arange(n)[:, None]
    cols = np.arange(m)[None, :]
    noise = rng.uniforms(1, rng.STREAM_GENERIC, rows, cols)
    anchors = rng.uniforms(1, rng.STREAM_ANCHOR, np.arange(n), 0)

    print(f"selected backend: {K.BACKEND}")
    t_np, s_np = timeit(K.chain_states_numpy, noise, anchors)
    print(f"chain_states   numpy  ({n}x{m}): {t_np * 1e3:8.1f} ms")
    if K.BACKEND == "numba":
        K.chain_states(noise[:128], anchors[:128])  # warm the JIT
        t_nb, s_nb = timeit(K.chain_states, noise, anchors)
        print(f"chain_states   numba  ({n}x{m}): {t_nb * 1e3:8.1f} ms   ({t_np / t_nb:.1f}x)")
        print(f"bit-identical: {np.array_equal(s_np, s_nb)}")

    q = args.q
    a = np.full(q, 1.0 / q)
    b = rng.uniforms(2, rng.STREAM_GENERIC, np.arange(q), 0)
    b /= b.sum()
    t_np, c_np = timeit(K.cyclic_convolve_weights_numpy, a, b, repeats=3)
    print(f"cyclic_convolve numpy (q={q}):   {t_np * 1e3:8.1f} ms")
    if K.BACKEND == "numba":
        K.cyclic_convolve_weights(a[:16], b[:16] / b[:16].sum())
        t_nb, c_nb = timeit(K.cyclic_convolve_weights, a, b, repeats=3)
        print(f"cyclic_convolve numba (q={q}):   {t_nb * 1e3:8.1f} ms   ({t_np / t_nb:.1f}x)")
        print(f"bit-identical: {np.array_equal(c_np, c_nb)}")


if __name__ == "__main__":
    main()

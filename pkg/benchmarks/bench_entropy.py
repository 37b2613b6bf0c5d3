#!/usr/bin/env python3
"""Benchmark the two column-entropy kernel backends on a synthetic corpus.

Builds a crosswalk-shaped batch (many small per-map matrices), times the
numba kernel against the pure-numpy fallback, and checks that they agree.

    python benchmarks/bench_entropy.py [--maps 160000] [--repeats 5]

Select the backend used by the library itself with GEMENTROPY_BACKEND.
"""

import argparse
import time

import numpy as np

from gementropy._kernels import (
    column_entropies_numba,
    column_entropies_numpy,
    N_SYMBOLS,
)


def build_corpus(n_maps: int, seed: int = 0):
    """Random batch shaped like a real crosswalk: mostly 1-row maps with a
    long tail of larger ones, codes up to 8 characters wide."""
    rng = np.random.default_rng(seed)
    heights = np.minimum(rng.geometric(0.45, n_maps), 60).astype(np.int64)
    widths = rng.integers(3, 9, n_maps).astype(np.int64)
    flat = rng.integers(0, N_SYMBOLS, int(np.sum(heights * widths))).astype(np.uint8)
    return flat, heights, widths


def time_kernel(kernel, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        kernel(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--maps", type=int, default=160_000)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    opts = parser.parse_args()

    flat, heights, widths = build_corpus(opts.maps, opts.seed)
    cells = int(np.sum(heights * widths))
    print(
        f"corpus: {opts.maps} maps, {cells} cells, "
        f"{int(np.sum(widths))} columns"
    )

    # compile before timing
    column_entropies_numba(flat[:100], heights[:10], widths[:10])

    out_numpy = column_entropies_numpy(flat, heights, widths)
    out_numba = column_entropies_numba(flat, heights, widths)
    worst = float(np.max(np.abs(out_numpy - out_numba)))
    print(f"max |numpy - numba| = {worst:.3e}")
    assert worst < 1e-12, "backends disagree"

    t_numpy = time_kernel(column_entropies_numpy, (flat, heights, widths), opts.repeats)
    t_numba = time_kernel(column_entropies_numba, (flat, heights, widths), opts.repeats)
    print(f"numpy fallback: {t_numpy * 1e3:8.1f} ms")
    print(f"numba kernel:   {t_numba * 1e3:8.1f} ms")
    print(f"speedup:        {t_numpy / t_numba:8.2f}x")


if __name__ == "__main__":
    main()

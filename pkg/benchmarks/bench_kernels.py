"""Numba vs pure-numpy timings for the hot kernels.

Calls both implementations directly (independent of LMOMENTS_NUMBA), checks
that they agree, and prints best-of-N wall times.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import math
import time

import numpy as np

from lmoments import _accel, kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    rng = np.random.default_rng(0)
    ms = np.arange(32, 65, dtype=np.int64)
    ns = np.arange(32, 65, dtype=np.int64)
    km = rng.integers(0, 4001, 4000).astype(np.int64)
    kn = rng.integers(0, 4001, 4000).astype(np.int64)
    beta = np.exp(2j * np.pi * rng.random(400))
    wa = rng.standard_normal(20001) + 0j
    wb = rng.standard_normal(20001) + 0j
    vt = np.exp(-np.arange(20001) / 5000.0) + 0j
    weights = rng.standard_normal(4000) + 1j * rng.standard_normal(4000)
    ys = np.linspace(-3, 3, 2000)
    return {
        "kloosterman_many c=4001": (
            lambda: kernels._kloosterman_many_nb(km, kn, 4001),
            lambda: kernels._kloosterman_many_np(km, kn, 4001),
        ),
        "sigma_pair n=2e5": (
            lambda: kernels._sigma_pair_nb(200_000, 0.1 + 0.2j, -0.05j),
            lambda: kernels._sigma_pair_np(200_000, 0.1 + 0.2j, -0.05j),
        ),
        "residue_matrix q=101": (
            lambda: kernels._residue_matrix_nb(101, 20000, wa, wb, vt),
            lambda: kernels._residue_matrix_np(101, 20000, wa, wb, vt),
        ),
        "line_sum 4000x2000": (
            lambda: kernels._line_sum_nb(-20.0, 0.01, weights, ys),
            lambda: kernels._line_sum_np(-20.0, 0.01, weights, ys),
        ),
        "cusp_kernel 33x33": (
            lambda: kernels._cusp_kernel_nb(ms, ns, 2, 1, 3, 4, 0.5, 1, 120),
            lambda: kernels._cusp_kernel_np(ms, ns, 2, 1, 3, 4, 0.5, 1, 120),
        ),
        "incomplete_sums q=2003": (
            lambda: kernels._incomplete_sums_nb(2003, 11, 400, 400, beta),
            lambda: kernels._incomplete_sums_np(2003, 11, 400, 400, beta),
        ),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _accel._numba is None:
        print("numba is not installed; only the numpy path exists")
    print(f"{'kernel':28s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, (nb, npf) in cases().items():
        nb()  # compile outside the timing
        t_nb, a = best_of(nb, args.repeat)
        t_np, b = best_of(npf, args.repeat)
        diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        print(f"{name:28s} {t_nb:11.4g} {t_np:11.4g} {t_np / t_nb:8.1f} {diff:11.2g}")
    assert math.isfinite(diff)


if __name__ == "__main__":
    main()

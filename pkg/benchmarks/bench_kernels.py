"""Numba vs pure-numpy timings for the two hot kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call (compilation, or cache load) is timed separately.
"""
import argparse
import time

import numpy as np

from superstab.kernels import abs_negative_part_scaled, p_body_energy_kernel


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    cases = []
    for n, p in [(25, 3), (30, 3), (20, 4), (40, 3)]:
        pts = rng.uniform(0, 3, size=(n, 1))
        cases.append((f"p_body_energy n={n} p={p}",
                      lambda b, pts=pts, p=p: p_body_energy_kernel(pts, p, 1.0, 1.0, 12.0, 6.0, b)))
    for k in (10**5, 10**6):
        z = rng.standard_cauchy(size=(k, 2))
        cases.append((f"abs_negative_part k={k} p=3 d=1",
                      lambda b, z=z: abs_negative_part_scaled(z, 3, 1, 12.0, 6.0, b)))

    print(f"{'kernel':38s} {'first numba':>12s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, fn in cases:
        t0 = time.perf_counter()
        fn("numba")
        first = time.perf_counter() - t0
        t_nb, a = best_of(lambda: fn("numba"), args.repeat)
        t_np, b = best_of(lambda: fn("numpy"), args.repeat)
        assert np.allclose(a, b, rtol=1e-10), name
        print(f"{name:38s} {first:12.4f} {t_nb:10.5f} {t_np:10.5f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()

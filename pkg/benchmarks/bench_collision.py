"""Time one full collision assembly with the numba and numpy backends.

    python3 benchmarks/bench_collision.py [--sizes 48,96,192] [--repeat 5]
"""
import argparse
import time

import numpy as np

from condkin import DispersionModel, GridMeasure, GridSpec, KernelParams, total_rhs
from condkin._accel import HAVE_NUMBA, set_threads


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="48,96,192")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()
    threads = set_threads(args.threads)
    model = DispersionModel(2.0)
    rng = np.random.default_rng(0)
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    print(f"threads={threads}")
    print(f"{'n_cells':>8} {'active':>7} " + " ".join(f"{b + ' [ms]':>12}" for b in backends) + f" {'speedup':>8}")
    for n in (int(s) for s in args.sizes.split(",")):
        spec = GridSpec(n, 3.0)
        params = KernelParams(1.0, 1.0, 0.5, 0.0, 1.0)
        m = GridMeasure(spec, rng.random(n))
        res = {}
        for b in backends:
            total_rhs(m, params, model, backend=b)  # warm-up / jit
            res[b] = best_of(lambda: total_rhs(m, params, model, backend=b), args.repeat) * 1e3
        speed = res["numpy"] / res["numba"] if "numba" in res else float("nan")
        print(f"{n:>8} {n // 3:>7} " + " ".join(f"{res[b]:>12.3f}" for b in backends) + f" {speed:>8.1f}")


if __name__ == "__main__":
    main()

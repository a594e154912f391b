"""Time the compiled and pure-numpy pivoted QR kernels side by side.

    python3 benchmarks/bench_cpqr.py [--repeat N] [--sizes 200x100,1800x500]

Also times a full randomized pair CUR on each backend, since the kernel
only sees the small sketches there.
"""
import argparse
import statistics
import time

import numpy as np

from gcur import linalg
from gcur.experiments import generate_lowrank_pair
from gcur.pair import cur_pair
from gcur.sketch import SketchPlan


def median_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def parse_sizes(text):
    return [tuple(int(v) for v in item.split("x")) for item in text.split(",")]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", type=parse_sizes, default=parse_sizes("105x500,200x200,1800x500"))
    args = ap.parse_args()

    backends = linalg.available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; only the numpy fallback is available")
    rng = np.random.default_rng(0)

    print(f"{'case':>22} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for m, n in args.sizes:
        x = rng.standard_normal((m, n))
        times = [median_time(lambda b=b: linalg.cpqr(x, backend=b), args.repeat) for b in backends]
        _row(f"cpqr {m}x{n}", times)

    a, b = generate_lowrank_pair((1000, 800, 500), 100, seed=0)
    plan = SketchPlan(k=100, p=5)
    times = []
    for be in backends:
        linalg.BACKEND = be
        times.append(median_time(lambda: cur_pair(a, b, plan), args.repeat))
    _row("cur_pair 1000/800x500", times)


def _row(label, times):
    speed = f"{times[-1] / times[0]:8.1f}x" if len(times) > 1 else ""
    print(f"{label:>22} " + " ".join(f"{t:9.4f}s" for t in times) + f"  {speed}")


if __name__ == "__main__":
    main()

"""Compiled kernels vs the numpy fallback.

    python benchmarks/bench_kernels.py [--shots N] [--sweeps N] [--repeat N]

Times energy_batch, SA and the gradient sampler on the three built-in
examples with each backend, checks that both return identical results and
prints the speedup.
"""

import argparse
import time

import numpy as np

from hobokit import Schedule, _backend, compile_hobo, energy_batch, grad_run, sa_run
from hobokit.problems import EXAMPLES


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--shots", type=int, default=1000)
    ap.add_argument("--sweeps", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    try:
        _backend.use("compiled")
    except ImportError:
        raise SystemExit("compiled kernels are not built; run `pip install -e .` first")

    rng = np.random.default_rng(0)
    print(f"{'problem':<12}{'kernel':<14}{'compiled s':>12}{'python s':>12}{'speedup':>10}")
    for name, ex in EXAMPLES.items():
        b = ex.build()
        h, _ = compile_hobo(b.hamiltonian, b.registry)
        X = rng.integers(0, 2, size=(20000, h.n), dtype=np.uint8)
        sched = Schedule.default_for(h, args.sweeps)
        cases = {
            "energy_batch": lambda: energy_batch(h, X),
            "sa_run": lambda: sa_run(h, args.shots, sched, seed=1),
            "grad_run": lambda: grad_run(h, args.shots // 4, steps=50, seed=1),
        }
        for kernel, fn in cases.items():
            timings, results = {}, {}
            for backend in ("compiled", "python"):
                _backend.use(backend)
                timings[backend], results[backend] = best_of(fn, args.repeat)
            _backend.use("compiled")
            a, b_ = results["compiled"], results["python"]
            same = np.array_equal(a, b_) if isinstance(a, np.ndarray) else a == b_
            if not same:
                raise SystemExit(f"{name}/{kernel}: backends disagree")
            speedup = timings["python"] / timings["compiled"]
            print(f"{name:<12}{kernel:<14}{timings['compiled']:>12.4f}"
                  f"{timings['python']:>12.4f}{speedup:>9.1f}x")


if __name__ == "__main__":
    main()

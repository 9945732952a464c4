#!/usr/bin/env python3
"""Compare the numba and numpy kernel backends on sized workloads.

The backend choice is frozen per process at first kernel use, so one
process cannot time both paths. The driver therefore re-runs this file
in a child process per backend (TJD_ACCEL set in the child environment)
and prints a side-by-side table. Pass --backend to time one backend
in-process and emit a raw JSON row instead; that is the child mode.

Usage:
    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --scale 4 --repeats 7
    python benchmarks/bench_kernels.py --output results.json

The first numba run pays JIT compilation once; the kernels are disk
cached, so later runs only pay the cache load. Compilation is never
billed to a timing: every workload is warmed before the clock starts.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def build_workloads(scale):
    """Return (label, thunk) pairs over the public kernel entry points."""
    from tjdiv.generators import make_builtin
    from tjdiv.kernels import (
        cccp_steps, min_divergence_assign, pairwise_conformal,
        pairwise_total_jensen)

    rng = np.random.default_rng(20240815)
    g4 = make_builtin("shannon", 4)
    burg = make_builtin("burg", 4)

    n_pair = int(200_000 * scale)
    p = rng.uniform(0.1, 5.0, size=(n_pair, 4))
    q = rng.uniform(0.1, 5.0, size=(n_pair, 4))

    n_assign = int(50_000 * scale)
    x = rng.uniform(0.1, 5.0, size=(n_assign, 4))
    centers = rng.uniform(0.5, 4.0, size=(16, 4))

    n_cccp = int(20_000 * scale)
    xc = rng.uniform(0.1, 5.0, size=(n_cccp, 4))
    w = rng.uniform(0.5, 1.5, size=n_cccp)
    w /= w.sum()
    c0 = xc.mean(axis=0)

    return [
        (f"pairwise_total_jensen shannon n={n_pair}",
         lambda: pairwise_total_jensen(g4, 0.3, p, q)),
        (f"pairwise_total_jensen burg n={n_pair}",
         lambda: pairwise_total_jensen(burg, 0.3, p, q)),
        (f"pairwise_conformal shannon n={n_pair}",
         lambda: pairwise_conformal(g4, p, q)),
        (f"min_divergence_assign n={n_assign} k=16",
         lambda: min_divergence_assign(g4, 0.5, x, centers)),
        (f"cccp_steps n={n_cccp} iters=50",
         lambda: cccp_steps(g4, 0.5, xc, w, c0, 50)),
    ]


def time_backend(scale, repeats):
    from tjdiv import kernels
    from tjdiv._accel import backend

    kernels.warm_up()
    timings = {}
    for label, thunk in build_workloads(scale):
        thunk()  # untimed: page in buffers, spin up the thread pool
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            thunk()
            best = min(best, time.perf_counter() - t0)
        timings[label] = best
    return {"backend": backend(), "timings": timings}


def run_child(name, args):
    env = dict(os.environ, TJD_ACCEL=name)
    cmd = [sys.executable, os.path.abspath(__file__), "--backend", name,
           "--scale", str(args.scale), "--repeats", str(args.repeats)]
    proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise SystemExit(f"{name} child exited with {proc.returncode}")
    return json.loads(proc.stdout)


def main():
    parser = argparse.ArgumentParser(
        description="benchmark the numba kernels against the numpy fallback")
    parser.add_argument("--scale", type=float, default=1.0,
                        help="multiplier on every workload size")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed runs per workload, best is kept")
    parser.add_argument("--output", help="write raw results to a JSON file")
    parser.add_argument("--backend", choices=("numba", "numpy"),
                        help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.backend:
        # child mode: TJD_ACCEL was set by the driver
        json.dump(time_backend(args.scale, args.repeats), sys.stdout)
        return

    import importlib.util
    have_numba = importlib.util.find_spec("numba") is not None
    if not have_numba:
        print("numba is not installed, timing the numpy path only\n")

    results = {}
    for name in (("numba", "numpy") if have_numba else ("numpy",)):
        print(f"timing {name} backend ...", flush=True)
        results[name] = run_child(name, args)

    labels = list(results[next(iter(results))]["timings"])
    width = max(len(s) for s in labels)
    if have_numba:
        print(f"\n{'workload':<{width}} {'numba (ms)':>12} "
              f"{'numpy (ms)':>12} {'speedup':>9}")
        print("-" * (width + 36))
        for label in labels:
            tb = results["numba"]["timings"][label] * 1e3
            tn = results["numpy"]["timings"][label] * 1e3
            print(f"{label:<{width}} {tb:>12.3f} {tn:>12.3f} "
                  f"{tn / tb:>8.1f}x")
    else:
        print(f"\n{'workload':<{width}} {'numpy (ms)':>12}")
        print("-" * (width + 13))
        for label in labels:
            tn = results["numpy"]["timings"][label] * 1e3
            print(f"{label:<{width}} {tn:>12.3f}")

    if args.output:
        with open(args.output, "w") as fh:
            json.dump(results, fh, indent=2)
        print(f"\nraw results written to {args.output}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the compiled shooting kernel against the pure-Python fallback.

The RK4 amplitude march is the package's hot loop: a ground-state solve runs
~50 trajectories through it, and refinement studies multiply the step counts.
This script times the raw kernel on a near-critical trajectory (worst case:
no early classification exit) and a full solve through each backend.

Usage: python benchmarks/bench_shooting.py [--steps N] [--repeat K]
"""

import argparse
import importlib
import time

import numpy as np


def time_kernel(impl, amplitude, steps, h, repeat):
    u = np.empty(steps + 1)
    v = np.empty(steps + 1)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        impl.integrate(amplitude, 2, 2.0, 1.0, h, steps, True,
                       1e-5 * amplitude, 1e-12, 100, u, v)
        best = min(best, time.perf_counter() - t0)
    return best


def time_solve(backend_name, repeat):
    import os
    import subprocess
    import sys

    code = (
        "import time\n"
        "from qlgs import Params, SolverOptions, find_ground_state\n"
        "t0 = time.perf_counter()\n"
        "for _ in range(%d):\n"
        "    find_ground_state(Params(2, 2.0, 1.0), SolverOptions(nodes=3001))\n"
        "print((time.perf_counter() - t0) / %d)\n" % (repeat, repeat)
    )
    env = dict(os.environ)
    if backend_name == "python":
        env["QLGS_FORCE_PYTHON"] = "1"
    else:
        env.pop("QLGS_FORCE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", code], capture_output=True,
                         text=True, env=env, check=True)
    return float(out.stdout.strip())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = {}
    backends["python"] = importlib.import_module("qlgs._shoot_py")
    try:
        backends["cython"] = importlib.import_module("qlgs._shoot_cy")
    except ImportError:
        print("compiled kernel not built; benchmarking the fallback only")

    # near-critical amplitude: the march runs the whole grid
    amplitude = 2.0713071978
    h = 20.0 / args.steps

    print(f"kernel march, {args.steps} steps (best of {args.repeat}):")
    times = {}
    for name, impl in backends.items():
        times[name] = time_kernel(impl, amplitude, args.steps, h, args.repeat)
        rate = args.steps / times[name] / 1e6
        print(f"  {name:7s} {times[name] * 1e3:9.3f} ms   {rate:7.1f} Msteps/s")
    if len(times) == 2:
        print(f"  speedup: {times['python'] / times['cython']:.1f}x")

    print("\nfull ground-state solve, (N,p,omega)=(2,2,1), 3001 nodes:")
    for name in backends:
        t = time_solve(name, 3 if name == "cython" else 1)
        print(f"  {name:7s} {t * 1e3:9.1f} ms")


if __name__ == "__main__":
    main()

"""Benchmark the LP kernel's compiled path against the pure-NumPy fallback.

Run `python3 benchmarks/bench_simplex.py` for a two-backend comparison
(it re-invokes itself in a subprocess with HYBZONO_DISABLE_NUMBA=1), or
`--single` to time only the backend selected by the current environment.

Workloads mirror how the solver uses the kernel: many small LPs at
branch-and-bound node scale, and fewer medium/large LPs at late-step
estimation scale.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

SIZES = [
    ("small (m=6, n=16)", 6, 16, 400),
    ("medium (m=40, n=90)", 40, 90, 60),
    ("large (m=120, n=300)", 120, 300, 4),
]


def make_cases(m, n, reps, seed=0):
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(reps):
        A = rng.normal(size=(m, n))
        x0 = rng.uniform(-1, 1, n)
        b = A @ x0
        c = rng.normal(size=n)
        cases.append((c, A, b, -np.ones(n), np.ones(n)))
    return cases


def run_single():
    from hybzono.simplex import LpProblem, lp_solve, NUMBA_ENABLED

    results = {"backend": "numba" if NUMBA_ENABLED else "numpy", "rows": []}
    # warm-up triggers JIT compilation outside the timed region
    lp_solve(LpProblem([1.0], np.zeros((0, 1)), [], [-1.0], [1.0]))
    for label, m, n, reps in SIZES:
        cases = make_cases(m, n, reps)
        problems = [LpProblem(c, A, b, lo, hi) for c, A, b, lo, hi in cases]
        t0 = time.perf_counter()
        checksum = 0.0
        for p in problems:
            res = lp_solve(p)
            checksum += res.value
        dt = time.perf_counter() - t0
        results["rows"].append({
            "workload": label,
            "solves": reps,
            "total_s": dt,
            "per_solve_ms": 1e3 * dt / reps,
            "checksum": checksum,
        })
    return results


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--single", action="store_true",
                        help="time only the current backend, print JSON")
    args = parser.parse_args()
    if args.single:
        print(json.dumps(run_single()))
        return

    here = os.path.abspath(__file__)

    def spawn(disable):
        env = dict(os.environ)
        env["HYBZONO_DISABLE_NUMBA"] = "1" if disable else ""
        out = subprocess.run([sys.executable, here, "--single"], env=env,
                             capture_output=True, text=True, check=True)
        return json.loads(out.stdout.strip().splitlines()[-1])

    fast = spawn(disable=False)
    slow = spawn(disable=True)
    print(f"{'workload':<24} {'numba ms':>10} {'numpy ms':>10} {'speedup':>9}")
    for rf, rs in zip(fast["rows"], slow["rows"]):
        assert rf["workload"] == rs["workload"]
        if abs(rf["checksum"] - rs["checksum"]) > 1e-6 * max(
                1.0, abs(rf["checksum"])):
            raise SystemExit("backends disagree on objective checksums")
        ratio = rs["per_solve_ms"] / rf["per_solve_ms"]
        print(f"{rf['workload']:<24} {rf['per_solve_ms']:>10.3f} "
              f"{rs['per_solve_ms']:>10.3f} {ratio:>8.1f}x")
    print("(checksums agree between backends)")


if __name__ == "__main__":
    main()

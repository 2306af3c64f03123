"""Compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--quick]

Kernel timings call both implementations side by side. Whole-sample
timings run in a subprocess per backend, since the backend is chosen at
import time.
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

from youngwalls.density import iterate_recurrence, polyo_2nx3_block
from youngwalls.kernels import _pure

try:
    from youngwalls.kernels import _ckernels
except ImportError:
    _ckernels = None

SAMPLE_SCRIPT = """
import json, sys, time
from youngwalls import sampler
from youngwalls.density import iterate_recurrence, polyo_2nx3_block
from youngwalls.kernels import BACKEND
n, reps = int(sys.argv[1]), int(sys.argv[2])
tower = iterate_recurrence(polyo_2nx3_block(), n)
rng = sampler.make_rng(1)
sampler.sample_polyomino(tower, n, rng)
t0 = time.perf_counter()
for _ in range(reps):
    sampler.sample_polyomino(tower, n, rng)
print(json.dumps({"backend": BACKEND, "seconds": (time.perf_counter() - t0) / reps}))
"""


def per_call(fn, number: int) -> float:
    return min(timeit.repeat(fn, number=number, repeat=3)) / number


def kernel_cases(n: int):
    p = iterate_recurrence(polyo_2nx3_block(), n).polys[n]
    top = max(abs(c) for c in p.coeffs)
    floats = [float(c / top) for c in p.coeffs]
    scale = 1 << 200
    ints = [int(c * scale / top) for c in p.coeffs]
    anti = [0] + [c // (i + 1) for i, c in enumerate(ints)]
    total = sum(anti)
    target = total // 3
    grid = 60
    return {
        f"cdf_invert_double (degree {len(floats) - 1})": lambda m: m.cdf_invert_double(
            floats, 0.1, 0.9, 0.37, 1e-12, 1e-6
        ),
        f"FixedPoly.value (degree {len(ints) - 1})": lambda m: m.FixedPoly(ints, grid).value(1 << 59),
        f"FixedPoly.invert (degree {len(anti) - 1})": lambda m: m.FixedPoly(anti, grid).invert(
            0, 1 << grid, target, 1 << 20
        ),
    }


def sample_time(n: int, reps: int, pure: bool) -> dict:
    env = dict(os.environ)
    if pure:
        env["YOUNGWALLS_PURE_PYTHON"] = "1"
    else:
        env.pop("YOUNGWALLS_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", SAMPLE_SCRIPT, str(n), str(reps)],
                         capture_output=True, text=True, check=True, env=env)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="fewer and smaller cases")
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the fallback is available", file=sys.stderr)

    print(f"{'kernel':<36} {'python':>12} {'compiled':>12} {'speedup':>8}")
    for n in (3, 12) if args.quick else (3, 12, 30):
        for name, call in kernel_cases(n).items():
            number = 200 if n <= 3 else 20
            slow = per_call(lambda: call(_pure), number)
            fast = per_call(lambda: call(_ckernels), number) if _ckernels else float("nan")
            print(f"{name:<36} {slow * 1e6:>10.1f}us {fast * 1e6:>10.1f}us {slow / fast:>7.1f}x")

    print()
    print(f"{'one polyomino sample':<36} {'python':>12} {'compiled':>12} {'speedup':>8}")
    for n, reps in ((2, 200), (10, 20), (25, 5)) if args.quick else ((2, 500), (10, 50), (25, 10), (50, 3)):
        slow = sample_time(n, reps, pure=True)
        fast = sample_time(n, reps, pure=False)
        tag = "" if fast["backend"] == "compiled" else " (fallback only)"
        print(f"{'n = ' + str(n) + tag:<36} {slow['seconds'] * 1e3:>10.2f}ms "
              f"{fast['seconds'] * 1e3:>10.2f}ms {slow['seconds'] / fast['seconds']:>7.1f}x")


if __name__ == "__main__":
    main()

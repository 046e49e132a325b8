"""Compare the compiled kernels with the numpy fallback.

Kernel calls are timed in-process against both backends.  The end-to-end
``verify_skew`` run goes through a subprocess per backend because the
backend is fixed at import time.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--grid 1024]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from skewloops import kernels

END_TO_END = """
import time
from skewloops import kernels
from skewloops.construct import build_cylinder_loop, construct_height
from skewloops.oval import make_support_oval
from skewloops.trigpoly import TrigPoly
from skewloops.verify import verify_skew
s = make_support_oval(TrigPoly(1.0, [0.0, 0.1, 0.05], [0.0, 0.0, 0.02]))
loop = build_cylinder_loop(s, construct_height(s.v))
best = float("inf")
for _ in range({repeat}):
    t0 = time.perf_counter()
    cert = verify_skew(loop)
    best = min(best, time.perf_counter() - t0)
print(kernels.BACKEND, cert.status.value, best)
"""


def inputs(grid, rng):
    n = 16
    a0, cos, sin = rng.normal(size=3), rng.normal(size=(3, n)), rng.normal(size=(3, n))
    t = rng.uniform(-50.0, 50.0, 200_000)
    s = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    tau = np.stack([np.cos(s), np.sin(s), 0.3 * np.sin(3 * s)], axis=1)
    tau /= np.linalg.norm(tau, axis=1, keepdims=True)
    P = np.stack([np.cos(s), np.sin(s), 0.2 * np.sin(2 * s)], axis=1)
    P /= np.linalg.norm(P, axis=1, keepdims=True)
    return {
        "trig_eval": lambda k: k.trig_eval(a0, cos, sin, t),
        "defect_grid_min": lambda k: k.defect_grid_min(tau, grid // 64),
        "sphere_polyline_crossing": lambda k: k.sphere_polyline_crossing(P[:512]),
    }


def time_kernels(repeat, grid):
    backends = {"python": kernels.load_backend("python")}
    try:
        backends["cython"] = kernels.load_backend("cython")
    except ImportError:
        print("compiled backend not built; timing the fallback only")
    rows = []
    for name, call in inputs(grid, np.random.default_rng(0)).items():
        times = {b: min(timeit.repeat(lambda: call(k), number=1, repeat=repeat)) for b, k in backends.items()}
        rows.append((name, times))
    return rows


def time_end_to_end(repeat):
    out = {}
    for backend, flag in (("cython", "0"), ("python", "1")):
        env = dict(os.environ, SKEWLOOPS_PURE_PYTHON=flag)
        res = subprocess.run([sys.executable, "-c", END_TO_END.format(repeat=repeat)],
                             env=env, capture_output=True, text=True, check=True)
        used, status, best = res.stdout.split()
        out[used] = (status, float(best))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--grid", type=int, default=1024, help="tantrix samples for defect_grid_min")
    ap.add_argument("--json", action="store_true", help="print machine-readable results")
    args = ap.parse_args(argv)

    rows = time_kernels(args.repeat, args.grid)
    e2e = time_end_to_end(args.repeat)
    if args.json:
        print(json.dumps({"kernels": dict(rows), "verify_skew": e2e}, indent=1))
        return
    print(f"{'kernel':28s} {'python [s]':>12s} {'cython [s]':>12s} {'speedup':>9s}")
    for name, t in rows:
        cy = t.get("cython")
        speed = f"{t['python'] / cy:8.1f}x" if cy else "      n/a"
        print(f"{name:28s} {t['python']:12.5f} {cy if cy else float('nan'):12.5f} {speed}")
    py = e2e.get("python", (None, float("nan")))[1]
    cy = e2e.get("cython", (None, float("nan")))[1]
    print(f"{'verify_skew (end to end)':28s} {py:12.5f} {cy:12.5f} {py / cy:8.1f}x")


if __name__ == "__main__":
    main()

"""Timing comparison of the compiled and pure-Python Jacobi kernels.

Both backends execute the identical rotation schedule, so their outputs
match bitwise; this script reports wall time per decomposition across a
range of matrix sizes plus the observed speedup.

Run:  python benchmarks/bench_kernels.py [--sizes 8,16,32,64,128] [--reps 5]
"""

import argparse
import importlib
import time

import numpy as np


def _load_backends():
    from cubicmin._kernels import _jacobi_py

    backends = {"python": _jacobi_py.cyclic_jacobi}
    try:
        _jacobi = importlib.import_module("cubicmin._kernels._jacobi")
        backends["compiled"] = _jacobi.cyclic_jacobi
    except ImportError:
        pass
    return backends


def _time_once(kernel, a):
    n = a.shape[0]
    b = a.copy()
    v = np.eye(n)
    off_target = 1e-12 * float(np.linalg.norm(a, "fro"))
    t0 = time.perf_counter()
    kernel(b, v, 100, off_target)
    return time.perf_counter() - t0, b, v


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="8,16,32,64,128")
    parser.add_argument("--reps", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = _load_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; timing the python backend only")

    rng = np.random.default_rng(0)
    print(f"{'n':>5}  " + "".join(f"{k + ' (ms)':>16}" for k in backends) + "  speedup")
    for n in sizes:
        raw = rng.normal(size=(n, n))
        a = np.ascontiguousarray((raw + raw.T) / 2.0)
        best = {}
        results = {}
        for name, kernel in backends.items():
            times = []
            for _ in range(args.reps):
                dt, b, v = _time_once(kernel, a)
                times.append(dt)
            best[name] = min(times)
            results[name] = (b, v)
        if len(backends) == 2:
            pb, pv = results["python"]
            cb, cv = results["compiled"]
            parity = np.array_equal(pb, cb) and np.array_equal(pv, cv)
            ratio = best["python"] / best["compiled"]
            tail = f"  {ratio:6.1f}x  bitwise={parity}"
        else:
            tail = ""
        print(
            f"{n:>5}  "
            + "".join(f"{1e3 * best[k]:>16.3f}" for k in backends)
            + tail
        )


if __name__ == "__main__":
    main()

"""Compare the compiled and pure Python kernels.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from mixsig import kernels
from mixsig.minima import inhomogeneous_minimum
from mixsig.numberfield import build_lattice, load_catalog
from mixsig.reduction import positive_r


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def enumeration_case(mod, n=8, radius_sq=40.0):
    rng = np.random.default_rng(0)
    R = positive_r(rng.normal(size=(n, n)) + 2 * np.eye(n))
    center = rng.normal(size=n)
    return lambda: mod.enumerate_ball(R, center, radius_sq, 10**8, False)


def cell_bounds_case(mod, cells=2000, cand=64):
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(cells, 4))
    rad = np.abs(rng.normal(size=(cells, 4))) * 0.1
    C = rng.normal(size=(cand, 4))

    def run():
        for p, h in zip(pts, rad):
            mod.cell_bounds(p, h, C, 2, 1, 0)

    return run


def pipeline_case(label):
    spec = {s.label: s for s in load_catalog()}[label]
    lat = build_lattice(spec).lattice
    return lambda: inhomogeneous_minimum(lat, tol=1e-4)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    mods = kernels.backends()
    print(f"available backends: {', '.join(sorted(mods))} (selected: {kernels.BACKEND})")
    rows = []
    for name, make in [("enumerate_ball n=8", enumeration_case), ("cell_bounds x2000", cell_bounds_case)]:
        t = {b: best_of(make(m), args.repeat) for b, m in mods.items()}
        rows.append((name, t))
    for label in ("cubic-23", "quartic-275"):
        t = {}
        for b, m in mods.items():
            # swap the selected kernels for the duration of the run
            saved = kernels.enumerate_ball, kernels.cell_bounds
            kernels.enumerate_ball, kernels.cell_bounds = m.enumerate_ball, m.cell_bounds
            try:
                t[b] = best_of(pipeline_case(label), args.repeat)
            finally:
                kernels.enumerate_ball, kernels.cell_bounds = saved
        rows.append((f"M({label}) tol 1e-4", t))
    print(f"{'case':<26} {'python [s]':>12} {'cython [s]':>12} {'speedup':>9}")
    for name, t in rows:
        py, cy = t["python"], t.get("cython")
        cy_s = f"{cy:12.4f}" if cy is not None else f"{'n/a':>12}"
        sp = f"{py / cy:9.1f}" if cy else f"{'n/a':>9}"
        print(f"{name:<26} {py:12.4f} {cy_s} {sp}")


if __name__ == "__main__":
    main()

"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N] [--pipeline]

Micro benchmarks call both implementations on the same random rows.
``--pipeline`` also times the DFZ reduction end to end in two subprocesses,
one with GAUSSPROVE_PURE=1.
"""
import argparse
import os
import random
import subprocess
import sys
import timeit
from array import array

from gmpy2 import mpq

from gaussprove import _pykernels as py

try:
    from gaussprove import _ckernels as cy
except ImportError:
    cy = None


def random_row(rng, width, universe=400):
    return {k: mpq(rng.randint(-6, 6) or 1, rng.randint(1, 5)) for k in rng.sample(range(universe), width)}


def pivot_rows(rng, count, width):
    # rows with distinct pivots and no other pivot key inside, as reduce_full expects
    pivots = list(range(count))
    rows = {}
    for p in pivots:
        r = {k: mpq(rng.randint(-3, 3) or 1, rng.randint(1, 3)) for k in rng.sample(range(count, count + 300), width)}
        r[p] = mpq(1)
        rows[p] = r
    return rows


def workloads(rng):
    a, b = random_row(rng, 60), random_row(rng, 60)
    piv = pivot_rows(rng, 150, 12)
    form = random_row(rng, 80, 450)
    c = mpq(-3, 7)

    def axpy(m):
        return lambda: m.axpy(dict(a), b, c)

    def unit(m):
        return lambda: m.axpy(dict(a), b, mpq(-1))

    def scaled(m):
        return lambda: m.scaled(b, c)

    def reduce(m):
        return lambda: m.reduce_full(dict(form), piv)

    # a feasible dense LP, 30 rows by 90 columns
    rows, cols = 30, 90
    mat = array("d", [rng.randint(-3, 3) for _ in range(rows * cols)])
    x0 = [rng.randint(0, 2) for _ in range(cols)]
    rhs = array("d", [sum(mat[i * cols + j] * x0[j] for j in range(cols)) for i in range(rows)])

    def simplex(mod):
        return lambda: mod.float_simplex(mat, rhs, None, rows, cols, 100000)

    # last field divides --repeat for the slower kernels
    return [("axpy", axpy, 1), ("axpy unit", unit, 1), ("scaled", scaled, 1), ("reduce_full", reduce, 1),
            ("float_simplex", simplex, 500)]


def pipeline_time(pure):
    code = (
        "import time; from gaussprove.bench import dfz_problem; from gaussprove.prover import to_slack_space;"
        "from gaussprove.kernels import IMPLEMENTATION as I;"
        "t=time.perf_counter(); to_slack_space(dfz_problem().statement); print(I, time.perf_counter()-t)"
    )
    env = dict(os.environ)
    if pure:
        env["GAUSSPROVE_PURE"] = "1"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    name, secs = out.stdout.split()
    return name, float(secs)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=2000)
    ap.add_argument("--pipeline", action="store_true")
    args = ap.parse_args()
    if cy is None:
        print("compiled kernels not built; only the pure-Python timings are shown")
    rng = random.Random(0)
    print(f"{'kernel':<14}{'python us':>12}{'cython us':>12}{'speedup':>10}")
    for name, make, slow in workloads(rng):
        number = max(1, args.repeat // slow)
        tp = min(timeit.repeat(make(py), number=number, repeat=3)) / number * 1e6
        if cy is None:
            print(f"{name:<14}{tp:>12.2f}")
            continue
        tc = min(timeit.repeat(make(cy), number=number, repeat=3)) / number * 1e6
        print(f"{name:<14}{tp:>12.2f}{tc:>12.2f}{tp / tc:>9.2f}x")
    if args.pipeline:
        for pure in (True, False):
            name, secs = pipeline_time(pure)
            print(f"DFZ reduction with {name} kernels: {secs:.2f} s")


if __name__ == "__main__":
    main()

"""Compare the compiled and numpy element kernels.

    python3 benchmarks/bench_kernels.py [--sizes 400 1600 6400] [--repeat 200]

Prints per-call times for energy-only and energy+gradient evaluations, the
speedup of the compiled backend and the largest discrepancy between backends.
"""

import argparse
import timeit

import numpy as np

from semipositone.kernels import backends
from semipositone.radialfem import build_mesh


def workload(M: int, seed: int = 0):
    mesh = build_mesh(M, 60.0, 5.0)
    rng = np.random.default_rng(seed)
    u = np.exp(-mesh.nodes / 10.0) * (1.0 + 0.1 * rng.standard_normal(M + 1))
    wq = np.ascontiguousarray(rng.uniform(0.1, 1.0, size=(M, 2)))
    return u, np.ascontiguousarray(mesh.dr), np.ascontiguousarray(mesh.moment), wq


def run(impl, args, p, q, a, eps, with_grad):
    u, dr, moment, wq = args
    g = np.zeros_like(u) if with_grad else None
    e = impl.kinetic(u, dr, moment, p, g) / p - impl.potential_power(u, wq, q, 0.0, a, eps, g)
    return e, g


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[400, 1600, 6400])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--p", type=float, default=2.5)
    args = ap.parse_args(argv)

    impls = backends()
    if "cython" not in impls:
        print("compiled backend not built; timing the numpy fallback only")
    print(f"{'M':>6} {'mode':>9} " + " ".join(f"{k + ' [us]':>13}" for k in impls) + f" {'speedup':>8} {'max diff':>9}")
    for M in args.sizes:
        data = workload(M)
        for with_grad in (False, True):
            times, outs = {}, {}
            for name, impl in impls.items():
                call = lambda: run(impl, data, args.p, 4.0, 0.1, 1e-6, with_grad)
                outs[name] = call()
                times[name] = min(timeit.repeat(call, number=args.repeat, repeat=3)) / args.repeat * 1e6
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            diff = 0.0
            if "cython" in outs:
                (e0, g0), (e1, g1) = outs["python"], outs["cython"]
                diff = abs(e0 - e1) / abs(e0)
                if with_grad:
                    diff = max(diff, float(np.max(np.abs(g0 - g1)) / np.max(np.abs(g0))))
            mode = "E+grad" if with_grad else "E"
            print(f"{M:>6} {mode:>9} " + " ".join(f"{times[k]:>13.1f}" for k in impls) + f" {speed:>8.2f} {diff:>9.1e}")


if __name__ == "__main__":
    main()

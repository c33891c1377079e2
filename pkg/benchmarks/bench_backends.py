"""Compare the compiled and pure-Python kernels on the hot paths.

    python3 benchmarks/bench_backends.py [--repeat N] [--json]

Workloads: exact elimination of the (7,2) bracket system at (m,W) = (4,30)
and of the larger (8,3) system at (4,96),
RK4 on the V_{7,2} flow in double and double-double precision, and
evaluation of the item-6 integral at many phase points.
"""

import argparse
import json
import time

import numpy as np

from excpot import backend
from excpot.dynamics import _to_quad, pack_polys, sample_initial_states
from excpot.mech import catalog, exceptional_system, hamiltonian_vector_field
from excpot.search import _integral_row, build_bracket_system, enumerate_ansatz


def workloads():
    systems = {}
    for k, l, m, W in ((7, 2, 4, 30), (8, 3, 4, 96)):
        M, _ = build_bracket_system(exceptional_system(k, l, 1, "bihomogeneous"), enumerate_ansatz(k, m, W))
        systems[(k, l, m, W)] = ([_integral_row(r) for r in M.rows], list(range(M.ncols)))
    small, large = systems[(7, 2, 4, 30)], systems[(8, 3, 4, 96)]

    e = catalog(7, 2)
    exps, coefs, offs = pack_polys(hamiltonian_vector_field(e.system("natural")))
    z0 = _to_quad(sample_initial_states(1)[0].z)
    jx, jc, _ = pack_polys([e.J_natural])
    Z = np.array([_to_quad(s.z) for s in sample_initial_states(2000, seed=1)])

    return {
        "gauss_jordan (7,2) m=4 W=30": lambda k: k.gauss_jordan(*small),
        "gauss_jordan (8,3) m=4 W=96": lambda k: k.gauss_jordan(*large),
        "rk4 double, 2000 steps": lambda k: k.rk4_integrate(exps, coefs, offs, z0, 1e-4, 2000, 100, False),
        "rk4 double-double, 2000 steps": lambda k: k.rk4_integrate(exps, coefs, offs, z0, 1e-4, 2000, 100, True),
        "poly_eval J, 2000 points": lambda k: k.poly_eval(jx, jc, Z, False),
        "poly_eval J dd, 2000 points": lambda k: k.poly_eval(jx, jc, Z, True),
    }


def best_of(fn, kernels, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(kernels)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    args = ap.parse_args()
    names = backend.available_backends()
    results = {}
    for label, fn in workloads().items():
        results[label] = {n: best_of(fn, backend.get_backend(n), args.repeat) for n in names}
    if args.json:
        print(json.dumps(results, indent=2))
        return
    head = f"{'workload':34}" + "".join(f"{n:>12}" for n in names) + ("   speedup" if len(names) > 1 else "")
    print(head)
    print("-" * len(head))
    for label, row in results.items():
        line = f"{label:34}" + "".join(f"{row[n]:11.4f}s" for n in names)
        if len(names) > 1:
            line += f"   {row['python'] / row['cython']:6.1f}x"
        print(line)


if __name__ == "__main__":
    main()

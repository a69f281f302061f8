#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Times the two hot paths (rational-function grid evaluation and the nodal
solve) on workloads shaped like the oracle-equivalence protocol: hundreds of
systems times a 200-point log grid.  Run:

    python benchmarks/bench_kernels.py [--points 200] [--systems 500]
"""

import argparse
import time

import numpy as np

from pdnz import PdnSystem, RlcBranch, ThreeSupplyPdn, system_rf, to_netlist
from pdnz._kernels import numba_backend, numpy_backend


def _workload(points, systems):
    rng = np.random.default_rng(99)
    omega = 2 * np.pi * np.geomspace(1e5, 1e11, points)
    ratios = []
    nets = []
    for _ in range(systems):
        branches = [RlcBranch(10 ** rng.uniform(-3, 0),
                              10 ** rng.uniform(-11, -7),
                              10 ** rng.uniform(-11, -6)) for _ in range(6)]
        sys_ = PdnSystem(ThreeSupplyPdn(*branches))
        rf = system_rf(sys_)
        ratios.append((np.array(rf.num.coeffs), np.array(rf.den.coeffs)))
        nets.append(to_netlist(sys_)._element_arrays())
    return omega, ratios, nets


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--points", type=int, default=200)
    parser.add_argument("--systems", type=int, default=500)
    args = parser.parse_args()

    omega, ratios, nets = _workload(args.points, args.systems)
    backends = {"numpy": numpy_backend()}
    try:
        backends["numba"] = numba_backend()
    except ImportError:
        print("numba unavailable, benchmarking the numpy path only")

    print(f"workload: {args.systems} three-supply systems x {args.points} points")
    results = {}
    for name, impl in backends.items():
        eval_ratio = impl["eval_ratio"]
        mna_solve = impl["mna_solve"]
        eval_ratio(*ratios[0], omega)  # compile / warm
        mna_solve(*nets[0], 3, 1, 1, omega)

        t_eval = _time(lambda: [eval_ratio(num, den, omega) for num, den in ratios])
        t_mna = _time(lambda: [mna_solve(*arrs, 3, 1, 1, omega) for arrs in nets])
        results[name] = (t_eval, t_mna)
        print(f"  {name:>6}: eval_ratio {t_eval * 1e3:8.1f} ms   "
              f"mna_solve {t_mna * 1e3:8.1f} ms")

    if len(backends) == 2:
        ev_np, mna_np = results["numpy"]
        ev_nb, mna_nb = results["numba"]
        print(f"  speedup: eval_ratio x{ev_np / ev_nb:.1f}   "
              f"mna_solve x{mna_np / mna_nb:.1f}")
        va, _ = backends["numba"]["eval_ratio"](*ratios[0], omega)
        vb, _ = backends["numpy"]["eval_ratio"](*ratios[0], omega)
        dev_e = np.max(np.abs(va - vb) / np.abs(vb))
        va, _ = backends["numba"]["mna_solve"](*nets[0], 3, 1, 1, omega)
        vb, _ = backends["numpy"]["mna_solve"](*nets[0], 3, 1, 1, omega)
        dev_m = np.max(np.abs(va - vb) / np.abs(vb))
        print(f"  cross-backend agreement: eval {dev_e:.1e}, mna {dev_m:.1e}")


if __name__ == "__main__":
    main()

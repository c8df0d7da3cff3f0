"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Times ``context_sum`` over a full 256-example store and a whole default-config
simulation (one seed, LC policy) under each available backend.
"""

import argparse
import timeit
from array import array

import numpy as np

from edgeserve_sim import kernels
from edgeserve_sim.config import default_config
from edgeserve_sim.simcost import run_simulation
from edgeserve_sim.experiment import trace_for


def available():
    names = ["python"]
    try:
        kernels.backend("cython")
        names.append("cython")
    except ImportError:
        pass
    return names


def bench_context_sum(impl, repeat, n=256):
    rng = np.random.default_rng(0)
    times = array("d", np.sort(rng.uniform(0, 1000, n)))
    tasks = array("i", rng.integers(0, 3, n).tolist())
    weights = array("d", [1.0, 0.5, 0.25])
    call = lambda: impl.context_sum(times, tasks, 0, n, 1000.0, kernels.EXPONENTIAL, 0.01, weights)
    number = 2000
    return min(timeit.repeat(call, number=number, repeat=repeat)) / number


def bench_simulation(name, repeat):
    impl = kernels.backend(name)
    saved = kernels.context_sum, kernels.utility
    kernels.context_sum, kernels.utility = impl.context_sum, impl.utility
    try:
        cfg = default_config()
        trace = trace_for(cfg, cfg.seeds[0])
        run = lambda: run_simulation(cfg.catalog, trace, cfg.server, cfg.aoc, cfg.weights, "lc",
                                     cfg.options, seed=cfg.seeds[0])
        return min(timeit.repeat(run, number=1, repeat=repeat)), len(trace)
    finally:
        kernels.context_sum, kernels.utility = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = available()
    rows = {}
    for name in names:
        per_call = bench_context_sum(kernels.backend(name), args.repeat)
        sim_s, n_req = bench_simulation(name, args.repeat)
        rows[name] = (per_call, sim_s)
    print(f"{'backend':<8} {'context_sum (us)':>18} {'simulation (s)':>16}")
    for name, (per_call, sim_s) in rows.items():
        print(f"{name:<8} {per_call * 1e6:>18.2f} {sim_s:>16.3f}")
    if len(rows) == 2:
        py, cy = rows["python"], rows["cython"]
        print(f"speedup  {py[0] / cy[0]:>17.1f}x {py[1] / cy[1]:>15.1f}x   ({n_req} requests)")


if __name__ == "__main__":
    main()

"""Time the compiled and numpy vertex-enumeration kernels on the same inputs.

    python benchmarks/bench_enumeration.py [--seed N] [--max-comb N] [--repeat N]
"""

import argparse
import time

import numpy as np

from intervalid import _backend
from intervalid.oracle import brute_force_batch, combination_count
from intervalid.query import Query
from intervalid.synth import random_diagram


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--nodes", type=int, default=5)
    ap.add_argument("--min-comb", type=int, default=50_000)
    ap.add_argument("--max-comb", type=int, default=400_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    while True:
        d = random_diagram(rng, args.nodes, max_outcomes=3, arc_prob=0.6, max_combinations=args.max_comb)
        if combination_count(d) >= args.min_comb:
            break
    queries = [Query(n) for n in d.nodes]
    e = d.nodes[0]
    queries += [Query(t, {e: d.space(e).outcomes[0]}) for t in d.nodes[1:]]
    print(f"{d}\n{combination_count(d)} vertex assignments, {len(queries)} queries")

    kernels = {"numpy": _backend.enumerate_py}
    if _backend.enumerate_compiled is not None:
        kernels["cython"] = _backend.enumerate_compiled
    else:
        print("compiled extension not built; timing numpy only")
    results = {}
    for name, k in kernels.items():
        t, out = best_of(lambda: brute_force_batch(d, queries, kernel=k), args.repeat)
        results[name] = out
        print(f"{name:>7}: {t * 1e3:9.1f} ms")
    if len(results) == 2:
        dev = max(float(np.abs(a.lo - b.lo).max()) for a, b in zip(results["numpy"], results["cython"]))
        print(f"max |numpy - cython| on lower extrema: {dev:.2e}")


if __name__ == "__main__":
    main()

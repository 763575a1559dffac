#!/usr/bin/env python3
"""Benchmark the compiled likelihood kernels against the pure-Python twins.

Usage: python3 benchmarks/bench_kernels.py [n_chains]

Times the censored log-likelihood evaluation and a full random-walk chain
(the hot loop of the simulation harness) on both backends and verifies they
produce bit-identical output while at it.
"""

import sys
import time

import numpy as np

from pacdp._kernels import BACKEND, pure

try:
    from pacdp._kernels import _core as core
except ImportError:
    core = None

STATS = (-1.1, 1.4, 18.0, 35.0, 9.0, 11.0, 100.0)
N_ITER = 10_000
BURN = 2_000


def time_loglik(mod, n=200_000):
    thetas = np.linspace(-1.0, 1.0, n)
    fn = mod.censored_loglik
    t0 = time.perf_counter()
    acc = 0.0
    for th in thetas:
        acc += fn(th, 1.3, *STATS)
    return time.perf_counter() - t0, acc


def time_chain(mod, n_chains):
    rng = np.random.default_rng(7)
    total = 0.0
    last = None
    for _ in range(n_chains):
        draws = (rng.standard_normal(N_ITER), rng.standard_normal(N_ITER),
                 rng.random(N_ITER), rng.random(N_ITER))
        out = np.empty(N_ITER - BURN)
        t0 = time.perf_counter()
        mod.mh_chain(*STATS, 0.0, 0.3, 0.4, 0.4, BURN, 100, 0.3, *draws, out)
        total += time.perf_counter() - t0
        last = out
    return total / n_chains, last


def main():
    n_chains = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    print(f"active backend: {BACKEND}")
    rows = []
    outputs = {}
    for name, mod in (("pure", pure), ("compiled", core)):
        if mod is None:
            print("compiled backend unavailable; build with "
                  "`pip install -e . --no-build-isolation`")
            continue
        ll_t, _ = time_loglik(mod)
        ch_t, out = time_chain(mod, n_chains)
        outputs[name] = out
        rows.append((name, ll_t / 200_000 * 1e9, ch_t * 1e3))
    print(f"{'backend':<10} {'loglik ns/eval':>16} {'chain ms/10k iters':>20}")
    for name, ll_ns, ch_ms in rows:
        print(f"{name:<10} {ll_ns:>16.0f} {ch_ms:>20.2f}")
    if len(rows) == 2:
        print(f"speedup: loglik x{rows[0][1] / rows[1][1]:.1f}, "
              f"chain x{rows[0][2] / rows[1][2]:.1f}")
        same = np.array_equal(outputs["pure"], outputs["compiled"])
        print(f"outputs bit-identical: {same}")
        if not same:
            sys.exit(1)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the transitive-closure backends on sprinkled causal relations.

The closure is the hot kernel behind the k relation, the hierarchy report
and the acceptance sweeps. Run after building the extension in place
(python setup.py build_ext --inplace) to see both columns; without the
compiled kernel only the numpy fallback is timed.
"""

import argparse
import time

import numpy as np

from causalcones import _kernels, events


def relation_bits(n, q, seed, workload):
    if workload == "sprinkle":
        # near-transitive: the fallback closes it in one BLAS squaring
        box = ([-1.0] * (1 + q), [1.0] * (1 + q))
        e = events.sprinkle(q, n, box, seed=seed)
        return events.chronological_relation(e).bits
    # high-diameter: a noisy successor chain needs ~log2(n) squarings,
    # which is where the bit-parallel sweep pays off
    rng = np.random.default_rng(seed)
    bits = np.zeros((n, n), dtype=bool)
    bits[np.arange(n - 1), np.arange(1, n)] = True
    extra = rng.integers(0, n, (n // 10, 2))
    bits[extra[:, 0], extra[:, 1]] = True
    return bits


def time_backend(fn, bits, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(bits)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="100,300,600,1200",
                    help="comma-separated relation sizes")
    ap.add_argument("--q", type=int, default=1)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workloads", default="sprinkle,chain")
    args = ap.parse_args()

    backends = _kernels.available_backends()
    names = sorted(backends)
    print(f"active backend: {_kernels.BACKEND}")

    for workload in args.workloads.split(","):
        print(f"\nworkload: {workload}")
        header = f"{'n':>6} " + " ".join(f"{name:>12}" for name in names)
        if len(names) == 2:
            header += f" {'py/compiled':>12}"
        print(header)
        for n in [int(s) for s in args.sizes.split(",")]:
            bits = relation_bits(n, args.q, args.seed, workload)
            times = {}
            outputs = {}
            for name in names:
                times[name], outputs[name] = time_backend(backends[name], bits, args.repeats)
            results = list(outputs.values())
            for other in results[1:]:
                assert np.array_equal(results[0], other), "backends disagree"
            row = f"{n:>6} " + " ".join(f"{times[name] * 1e3:>10.2f}ms" for name in names)
            if len(names) == 2:
                row += f" {times['python'] / times['compiled']:>11.1f}x"
            print(row)


if __name__ == "__main__":
    main()

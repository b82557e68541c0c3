"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--x 1e8] [--repeat 3]
"""

import argparse
import math
import time

import numpy as np

from primeclusters import _backend, clusters, sieve
from primeclusters.characters import _root_tables, enumerate_characters


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def workloads(x):
    vals, logs = sieve.prime_powers(min(x, 10**7))
    chi = enumerate_characters(101)[7]
    cos_t, sin_t = _root_tables(chi.denominator)
    res = np.ascontiguousarray(vals % 101)
    logs = np.ascontiguousarray(logs)
    primes = np.ascontiguousarray(sieve.primes_in(0, min(x, 10**7)))
    return {
        f"primes_in(0, {x:.0e})": lambda: len(sieve.primes_in(0, x)),
        f"theta({x:.0e})": lambda: sieve.theta(x),
        f"scan x={x:.0e}, m=1": lambda: clusters.scan(clusters.ClusterQuery(x, math.log(x), 1)).count,
        "count_runs (primes < 1e7)": lambda: _backend.kernels().count_runs(primes, 2, 3, 1, 30, 0, 10**7, 10)[0],
        "char_sum mod 101 (u = 1e7)": lambda: _backend.kernels().char_sum(res, logs, chi.turns, cos_t, sin_t),
        "phi_rough(1e7, 100)": lambda: sieve.phi_rough(10**7, 100),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x", type=float, default=1e8)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    x = int(args.x)
    backends = _backend.available()
    rows = {}
    for name in backends:
        _backend.use_backend(name)
        for label, fn in workloads(x).items():
            fn()  # warm caches
            rows.setdefault(label, {})[name] = best_of(fn, args.repeat)
    _backend.use_backend("cython" if "cython" in backends else "python")

    width = max(map(len, rows))
    print(f"{'workload':<{width}}  " + "  ".join(f"{b:>10}" for b in backends) + "   speedup  agree")
    for label, res in rows.items():
        secs = [res[b][0] for b in backends]
        outs = [res[b][1] for b in backends]
        speed = secs[-1] / secs[0] if len(secs) > 1 else 1.0
        agree = all(abs(complex(o) - complex(outs[0])) <= 1e-9 * max(1.0, abs(complex(outs[0]))) for o in outs)
        print(f"{label:<{width}}  " + "  ".join(f"{s:>9.3f}s" for s in secs) + f"  {speed:>7.1f}x  {agree}")


if __name__ == "__main__":
    main()

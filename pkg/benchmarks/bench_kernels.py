"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 10000 100000] [--repeat 3]

Each row times one kernel call (best of --repeat) on random residues mod 4
and mod 2^31 - 1, and checks the two backends return identical arrays.
"""

import argparse
import time

import numpy as np

from regbip import kernels
from regbip.series import pentagonal_series


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(n, m, rng):
    a = rng.integers(0, m, n + 1, dtype=np.int64)
    b = rng.integers(0, m, n + 1, dtype=np.int64)
    b[0] = 1
    pent = pentagonal_series(n, m)
    exps, vals = pent.sparse_terms()
    signed = np.array([v - m if v > m // 2 else v for v in vals], dtype=np.int64)
    pos = exps > 0
    yield "sparse_mul", lambda k: k.sparse_mul(a, exps, signed, n, m)
    yield "sparse_div", lambda k: k.sparse_div(a, exps[pos], signed[pos], n, m, 1)
    if n <= 20000:
        # the quadratic dense kernels are only timed at small sizes
        yield "dense_mul", lambda k: k.dense_mul(a, b, n, m)
        yield "dense_inv", lambda k: k.dense_inv(b, n, m, 1)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10_000, 100_000, 1_000_000])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = kernels.backends()
    if "compiled" not in backends:
        print("compiled extension not built; timing the fallback only")
    rng = np.random.default_rng(args.seed)
    header = f"{'kernel':<11}{'N':>9}{'mod':>12}" + "".join(f"{name:>12}" for name in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for n in args.sizes:
        for m in (4, 2**31 - 1):
            for name, job in cases(n, m, rng):
                timings, outputs = [], []
                for backend in backends.values():
                    t, out = best_of(lambda: job(backend), args.repeat)
                    timings.append(t)
                    outputs.append(out)
                row = f"{name:<11}{n:>9}{m:>12}" + "".join(f"{t:>11.4f}s" for t in timings)
                if len(timings) == 2:
                    if not np.array_equal(outputs[0], outputs[1]):
                        raise SystemExit(f"backends disagree on {name} N={n} m={m}")
                    row += f"{timings[0] / timings[1]:>9.1f}x"
                print(row)


if __name__ == "__main__":
    main()

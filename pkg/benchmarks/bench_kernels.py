"""Benchmark the compiled linear algebra kernels against the fallback.

Run as `python benchmarks/bench_kernels.py`.  The two backends share
their API, so the same workload runs on both; the comparison is the
point of keeping the compiled path honest.
"""

import random
import time

from perfx import _linalg_py

try:
    from perfx import _speedups
except ImportError:
    _speedups = None


def random_modp(rng, m, n, p):
    return [[rng.randrange(p) for _ in range(n)] for _ in range(m)]


def random_int(rng, m, n, height=40):
    return [[rng.randint(-height, height) for _ in range(n)] for _ in range(m)]


def timeit(fn, *args, repeat=3):
    best = None
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, result


def run(label, workload, backends):
    print(f"\n{label}")
    times = {}
    results = {}
    for name, module in backends:
        fn, args = workload(module)
        times[name], results[name] = timeit(fn, *args)
        print(f"  {name:>8}: {times[name] * 1e3:9.2f} ms")
    values = list(results.values())
    if len(values) == 2 and values[0] != values[1]:
        raise AssertionError(f"backend disagreement in {label}")
    if len(times) == 2:
        print(f"  speedup: {times['python'] / times['cython']:.1f}x")


def main():
    rng = random.Random(7)
    backends = [("python", _linalg_py)]
    if _speedups is not None:
        backends.append(("cython", _speedups))
    else:
        print("compiled kernel unavailable; benchmarking fallback only")

    p = 2_000_000_011 % (2**31 - 1)
    p = 1_000_003
    a_modp = random_modp(rng, 200, 220, p)
    run("rank over GF(1000003), 200 x 220", lambda m: (m.rank_modp, (a_modp, p)), backends)

    b_modp = random_modp(rng, 150, 170, 5)
    run("nullspace over GF(5), 150 x 170", lambda m: (m.nullspace_modp, (b_modp, 5)), backends)

    c_int = random_int(rng, 60, 70)
    run("integer Bareiss rank, 60 x 70", lambda m: (m.rank_int, (c_int,)), backends)


if __name__ == "__main__":
    main()

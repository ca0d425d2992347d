#!/usr/bin/env python3
"""Benchmark the compiled Chebyshev kernel against the pure-Python fallback.

Workloads mirror where the simulator actually spends time: the dense
small-prime evaluation sweep the oracle tests do, protocol-sized exponents
over the default 256-bit prime, and semigroup triples over both.

Usage: python benchmarks/bench_backends.py [--small]
"""

import argparse
import random
import time

from chebauth._cheb_pure import cheb_eval_int as pure_eval
from chebauth.chaotic import DEFAULT_PRIME, backend_name

try:
    from chebauth._cheb_core import cheb_eval_int as compiled_eval
except ImportError:
    compiled_eval = None


def timed(kernel, cases):
    start = time.perf_counter()
    sink = 0
    for n, x, p in cases:
        sink ^= kernel(n, x, p)
    return time.perf_counter() - start, sink


def build_workloads(small):
    rng = random.Random(1)
    scale = 10 if small else 1

    sweep = [
        (n, x, 101)
        for x in [rng.randrange(101) for _ in range(10 // scale or 1)]
        for n in range(10_001)
    ]

    protocol = [
        (rng.randrange(2, 1 << 64), rng.randrange(DEFAULT_PRIME), DEFAULT_PRIME)
        for _ in range(2_000 // scale)
    ]

    triples = []
    for p in (101, DEFAULT_PRIME):
        for _ in range(1_000 // scale):
            u = rng.randrange(1, (1 << 20) + 1)
            v = rng.randrange(1, (1 << 20) + 1)
            x = rng.randrange(p)
            triples += [(u, x, p), (v, x, p), (u * v, x, p)]

    return [
        ("small-prime sweep (n <= 10^4)", sweep),
        ("256-bit prime, 64-bit exponents", protocol),
        ("semigroup triples, both primes", triples),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--small", action="store_true", help="shrink workloads ~10x")
    args = parser.parse_args()

    print(f"default backend selected at import: {backend_name}")
    if compiled_eval is None:
        print("compiled kernel is not built; showing pure-Python timings only\n")

    header = f"{'workload':<36}{'evals':>9}{'pure (s)':>12}{'compiled (s)':>14}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, cases in build_workloads(args.small):
        pure_time, pure_sink = timed(pure_eval, cases)
        if compiled_eval is None:
            print(f"{name:<36}{len(cases):>9}{pure_time:>12.3f}{'-':>14}{'-':>9}")
            continue
        compiled_time, compiled_sink = timed(compiled_eval, cases)
        assert pure_sink == compiled_sink, "kernels disagree"
        speedup = pure_time / compiled_time if compiled_time else float("inf")
        print(
            f"{name:<36}{len(cases):>9}{pure_time:>12.3f}{compiled_time:>14.3f}"
            f"{speedup:>8.1f}x"
        )


if __name__ == "__main__":
    main()

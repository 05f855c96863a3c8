"""Compare the compiled and numpy kernels on the error-exponent hot loop.

    python3 benchmarks/bench_kernels.py [--n 65536] [--repeat 200]
"""
import argparse
import sys
import timeit

from quadvar.kernels import load_backend
from quadvar.simlab import ChiSimConfig, run_chi_experiment
from quadvar import kernels


def bench_sum(backend, n, repeat):
    fn = backend.centered_uniform_sum
    t = min(timeit.repeat(lambda: fn(12345, n), number=repeat, repeat=3))
    return t / (repeat * n)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--n", type=int, default=65536, help="draws per call")
    p.add_argument("--repeat", type=int, default=200)
    args = p.parse_args(argv)

    names = ["python"]
    try:
        load_backend("cython")
        names.append("cython")
    except ImportError:
        print("compiled backend not built; timing numpy only", file=sys.stderr)

    results = {}
    for name in names:
        be = load_backend(name)
        results[name] = bench_sum(be, args.n, args.repeat)
        print(f"{name:>7}: {results[name] * 1e9:6.2f} ns per draw (n={args.n})")
    sums = {load_backend(n).centered_uniform_sum(7, args.n) for n in names}
    print(f"identical results across backends: {len(sums) == 1}")
    if len(results) == 2:
        print(f"speedup: {results['python'] / results['cython']:.1f}x")

    cfg = ChiSimConfig("midpoint", n=4096)
    res = run_chi_experiment(cfg)
    print(f"chi-sim midpoint --n 4096 with {kernels.BACKEND} backend: {res.runtime:.2f} s")


if __name__ == "__main__":
    main()

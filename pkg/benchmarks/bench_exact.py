"""Benchmark the compiled exact-arithmetic kernel against its pure-Python
twin, both on raw kernel calls and through the Rees/Hodge pipeline that
dominates the exact side of the test suite.

Run:  python3 benchmarks/bench_exact.py [--repeat 3]
"""

import argparse
import time

from specialk import _kernel
from specialk.exact import ExactComplex, Subspace
from specialk.hodge import Filtration
from specialk.rees import ReesBundle, purity_oracle, splitting_type
from specialk.utils import XorShift


def random_rows(rng, nrows, ncols, span=20):
    rows = []
    for _ in range(nrows):
        row = [1 + rng.randint(1, 7)]
        for _ in range(ncols):
            row.append(rng.randint(-span, span))
            row.append(rng.randint(-span, span))
        rows.append(row)
    return rows


def random_filtration_pair(rng, n):
    def vec():
        return [ExactComplex(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(n)]

    def filtration():
        proper = []
        dim = n
        while dim > 0:
            dim = rng.randint(0, dim - 1)
            if dim == 0:
                break
            sub = Subspace.span(n, [vec() for _ in range(dim)])
            if proper and not sub.is_subspace_of(proper[-1]):
                sub = sub & proper[-1]
            if sub.is_zero():
                break
            proper.append(sub)
            dim = sub.dim
        return Filtration.from_proper_steps(n, proper)

    return filtration(), filtration()


def bench_kernel(backend, reps):
    rng = XorShift(2024)
    mats = [random_rows(rng, 6, 12) for _ in range(300)]
    pairs = [(random_rows(rng, 8, 8), random_rows(rng, 8, 8)) for _ in range(300)]
    with _kernel.use_backend(backend) as impl:
        best = float("inf")
        for _ in range(reps):
            t0 = time.perf_counter()
            for m in mats:
                impl.rref(m, 12)
            for a, b in pairs:
                impl.matmul(a, b, 8)
            best = min(best, time.perf_counter() - t0)
    return best


def bench_pipeline(backend, reps):
    rng = XorShift(99)
    pairs = [random_filtration_pair(rng, 4) for _ in range(60)]
    with _kernel.use_backend(backend):
        best = float("inf")
        for _ in range(reps):
            t0 = time.perf_counter()
            for f, fbar in pairs:
                bundle = ReesBundle(f, fbar)
                st = splitting_type(bundle)
                for w in range(-1, 5):
                    assert purity_oracle(f, fbar, w) == st.is_constant(w)
            best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = sorted(_kernel.available_backends())
    if "cython" not in backends:
        print("note: compiled kernel unavailable; benchmarking python only")
    results = {}
    for name in backends:
        results[name] = (
            bench_kernel(name, args.repeat),
            bench_pipeline(name, args.repeat),
        )
    print(f"{'backend':<10} {'kernel ops':>12} {'rees pipeline':>14}")
    for name, (tk, tp) in results.items():
        print(f"{name:<10} {tk:>10.4f} s {tp:>12.4f} s")
    if "cython" in results and "python" in results:
        sk = results["python"][0] / results["cython"][0]
        sp = results["python"][1] / results["cython"][1]
        print(f"speedup    {sk:>10.2f} x {sp:>12.2f} x")


if __name__ == "__main__":
    main()

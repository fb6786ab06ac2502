"""Compare the compiled and pure-Python polynomial kernels.

    python3 benchmarks/bench_kernel.py [--repeat N]

Micro timings call both kernels directly on term dicts taken from the
builtin casebook; the end-to-end timing verifies case I.1 in a fresh
interpreter with and without GENCONTACT_PURE_PYTHON=1.
"""
import argparse
import os
import subprocess
import sys
import timeit

from gencontact import _pykernel
from gencontact.casebook import builtin_cases

try:
    from gencontact import _ckernel
except ImportError:
    _ckernel = None

E2E = ("import time; from gencontact._backend import BACKEND; "
       "from gencontact.casebook import builtin_cases, verify_case; "
       "r = {c.id: c for c in builtin_cases()}['I.1']; t = time.perf_counter(); "
       "verify_case(r); print(BACKEND, time.perf_counter() - t)")


def workload():
    rec = {c.id: c for c in builtin_cases()}["I.1"]
    polys = [c for g in rec.generators for c in g.generator.coefficients if c.terms]
    # squares of sums of neighbouring coefficients run to a few dozen terms,
    # closer to what prolongation produces
    sums = [sum(polys[i:i + 4], polys[i] * 0) for i in range(len(polys))]
    big = [(s * s + s).terms for s in sums]
    return [p.terms for p in polys], big


def bench(kernel, small, big, repeat):
    def mul():
        for p in small:
            for q in small:
                kernel.poly_mul(p, q)

    def add():
        for p in big:
            for q in big:
                kernel.poly_add(p, q)
    return {name: min(timeit.repeat(fn, number=1, repeat=repeat)) for name, fn in
            (("poly_mul", mul), ("poly_add", add))}


def end_to_end(pure):
    env = dict(os.environ)
    env.pop("GENCONTACT_PURE_PYTHON", None)
    if pure:
        env["GENCONTACT_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True,
                         text=True, check=True).stdout.split()
    return out[0], float(out[1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    small, big = workload()
    print(f"workload: {len(small)} coefficients, {len(big)} squared polys "
          f"(max {max(map(len, big))} terms)")
    py = bench(_pykernel, small, big, args.repeat)
    if _ckernel is None:
        print("compiled kernel not built; pure Python only")
    cy = bench(_ckernel, small, big, args.repeat) if _ckernel else {}
    print(f"{'op':<10}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for op, t in py.items():
        c = cy.get(op)
        print(f"{op:<10}{t:>12.4f}" + (f"{c:>12.4f}{t / c:>9.1f}x" if c else ""))
    for pure in (False, True):
        backend, t = end_to_end(pure)
        print(f"verify I.1 with {backend} kernel: {t:.3f}s")


if __name__ == "__main__":
    main()

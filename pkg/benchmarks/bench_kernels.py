"""Compare the compiled and pure-Python kernels.

Kernel timings call both modules directly on identical inputs and check
that the results agree.  The end-to-end timing runs a randomized criterion
suite in a subprocess per backend, forcing the fallback through
``TENSORQUOT_PURE_PYTHON=1``.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--cases 40]
"""
import argparse
import json
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction

from tensorquot._kernels import _pykernels

try:
    from tensorquot._kernels import _ckernels
except ImportError:
    _ckernels = None


def random_terms(rng, nvars, degree, density, rational=False):
    terms = {}
    for _ in range(density):
        e = [0] * nvars
        for _ in range(rng.randint(0, degree)):
            e[rng.randrange(nvars)] += 1
        c = rng.randint(-9, 9) or 1
        if rational:
            c = Fraction(c, rng.randint(1, 5))
        terms[tuple(e)] = c
    return terms


def workloads(seed=0):
    rng = random.Random(seed)
    a = random_terms(rng, 3, 8, 60)
    b = random_terms(rng, 3, 6, 40)
    prod = _pykernels.mul_terms(a, b, 3)
    ar = random_terms(rng, 3, 6, 30, rational=True)
    br = random_terms(rng, 3, 6, 30, rational=True)
    phi = [1, -1, 1, -1, 1, -1, 1]            # Phi_14 has degree 6
    va = [rng.randint(-5, 5) for _ in range(6)]
    vb = [rng.randint(-5, 5) for _ in range(6)]
    return {
        "mul_terms (int, 3 vars)": ("mul_terms", (a, b, 3)),
        "mul_terms (rational)": ("mul_terms", (ar, br, 3)),
        "divide_terms (exact)": ("divide_terms", (prod, b, 3)),
        "divide_terms (integral)": ("divide_terms", (prod, b, 3, True)),
        "cyc_mulmod (N = 14)": ("cyc_mulmod", (va, vb, phi)),
    }


def bench_kernels(repeat, number):
    rows = []
    for name, (fn, args) in workloads().items():
        row = {"workload": name}
        results = {}
        for label, mod in (("python", _pykernels), ("cython", _ckernels)):
            if mod is None:
                continue
            f = getattr(mod, fn)
            results[label] = f(*args)
            t = min(timeit.repeat(lambda: f(*args), repeat=repeat, number=number)) / number
            row[label] = t
        if len(results) == 2 and results["python"] != results["cython"]:
            raise SystemExit(f"backends disagree on {name}")
        rows.append(row)
    return rows


_SUITE = """
import json, time
from tensorquot import _kernels
from tensorquot.quotient import builtin_chart
from tensorquot.criterion import theorem_suite
chart = builtin_chart("symmetric(3)")
t = time.perf_counter()
res = theorem_suite(chart, {cases})
print(json.dumps({{"backend": _kernels.BACKEND, "seconds": time.perf_counter() - t,
                  "passed": res.passed}}))
"""


def bench_suite(cases):
    out = {}
    for pure in (True, False):
        env = dict(os.environ)
        if pure:
            env["TENSORQUOT_PURE_PYTHON"] = "1"
        else:
            env.pop("TENSORQUOT_PURE_PYTHON", None)
        proc = subprocess.run([sys.executable, "-c", _SUITE.format(cases=cases)],
                              env=env, capture_output=True, text=True, check=True)
        res = json.loads(proc.stdout)
        out[res["backend"]] = res
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=20)
    ap.add_argument("--cases", type=int, default=40)
    ap.add_argument("--skip-suite", action="store_true")
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; only the pure-Python backend is timed")
    print(f"{'workload':<28}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for row in bench_kernels(args.repeat, args.number):
        py = row["python"] * 1e3
        cy = row.get("cython")
        if cy is None:
            print(f"{row['workload']:<28}{py:>14.3f}{'-':>14}{'-':>10}")
        else:
            print(f"{row['workload']:<28}{py:>14.3f}{cy * 1e3:>14.3f}{py / (cy * 1e3):>9.1f}x")
    if not args.skip_suite:
        res = bench_suite(args.cases)
        print(f"\nsymmetric(3) criterion suite, {args.cases} cases")
        for backend, r in sorted(res.items()):
            print(f"  {backend:<8}{r['seconds']:8.2f} s  passed={r['passed']}")


if __name__ == "__main__":
    main()

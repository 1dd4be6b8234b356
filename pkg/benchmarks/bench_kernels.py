"""Time the compiled and pure-Python kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--n 200] [--repeat 5]

Both backends are imported side by side, so the extension must have been
built (``python3 setup.py build_ext --inplace``) for the comparison to run.
"""
import argparse
import timeit

import numpy as np

from r2opuc import kernels


def _data(n, seed=0):
    rng = np.random.default_rng(seed)
    ell = np.concatenate([[0.0], rng.uniform(0.05, 0.95, n + 1)])
    c = rng.uniform(-5.0, 5.0, n + 2)
    d = (1.0 - ell[:-1]) * ell[1:]
    return c, d


def cases(n):
    c, d = _data(n)
    xs = np.linspace(-10.0, 10.0, 50)
    x0 = kernels.sturm_zeros(c, d, n)[n // 2]
    dchain = np.full(20000, 0.25)
    return {
        "p_eval_many (50 points)": lambda m: m.p_eval_many(c, d, n, xs),
        "sturm_count": lambda m: m.sturm_count(c, d, n, 0.3),
        "sturm_zeros": lambda m: m.sturm_zeros(c, d, n),
        "twisted_refine": lambda m: m.twisted_refine(c, d, n, x0),
        "twisted_ratios": lambda m: m.twisted_ratios(c, d, n, x0),
        "backward_chain (depth 2e4)": lambda m: m.backward_chain(dchain, 20000, 10),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--n", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the Python backend is available")
    print(f"n = {args.n}")
    print(f"{'kernel':<28}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for label, fn in cases(args.n).items():
        times = {}
        for name, mod in backends.items():
            number = 1 if name == "python" else 20
            t = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
            times[name] = t
        line = f"{label:<28}" + "".join(f"{times[k] * 1e3:>12.3f}ms" for k in backends)
        if "cython" in times:
            line += f"{times['python'] / times['cython']:>9.0f}x"
        print(line)
    if "cython" in backends:
        c, d = _data(args.n)
        a = np.asarray(backends["python"].sturm_zeros(c, d, args.n))
        b = np.asarray(backends["cython"].sturm_zeros(c, d, args.n))
        print(f"max |zeros(python) - zeros(cython)| = {np.max(np.abs(a - b)):.1e}")


if __name__ == "__main__":
    main()

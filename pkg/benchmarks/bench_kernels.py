"""Compare the compiled and numpy kernels on a series the size of three years of minutes.

    python benchmarks/bench_kernels.py [--n 1570000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from secplf import _kernels_py, kernels


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1_570_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    d = 100 * np.exp(np.cumsum(rng.normal(0, 0.002, args.n)))
    backends = {"python": _kernels_py}
    if kernels.compiled_backend is not None:
        backends["compiled"] = kernels.compiled_backend
    else:
        print("compiled extension not built; timing the numpy fallback only")

    cases = {
        "max_delta T=600": lambda m: m.max_delta(d, 600, 1.25),
        "count_within T=600": lambda m: m.count_within(d, 600, 1.25),
        "count_within T=10000": lambda m: m.count_within(d, 10_000, 1.25),
        "exceedance_lags": lambda m: m.exceedance_lags(d, 1.25),
    }
    print(f"N = {args.n:,}, best of {args.repeat}")
    print(f"{'kernel':<22}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for label, fn in cases.items():
        times, outs = {}, {}
        for name, mod in backends.items():
            times[name], outs[name] = best_of(lambda: fn(mod), args.repeat)
        if len(outs) == 2:
            a, b = outs.values()
            assert np.array_equal(np.asarray(a), np.asarray(b)), f"{label}: backends disagree"
        speed = f"{times['python'] / times['compiled']:.1f}x" if "compiled" in times else "-"
        print(f"{label:<22}" + "".join(f"{t:>11.3f}s" for t in times.values()) + f"{speed:>10}")


if __name__ == "__main__":
    main()

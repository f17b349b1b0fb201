"""Compare the compiled and numpy kernel backends.

Run with ``python3 benchmarks/bench_kernels.py``.  Each row times one
kernel call on a uniform grid and reports the largest absolute difference
between the two backends' outputs.
"""

import argparse
import time

import numpy as np

from sphquant.kernels import available_backends


def _best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="12,24,36,48")
    parser.add_argument("--phi", type=float, default=0.5)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the numpy backend is available")
    sp, cp = np.sin(args.phi), np.cos(args.phi)
    header = f"{'kernel':<18}{'N':>4}" + "".join(f"{name:>12}" for name in backends)
    print(header + f"{'speedup':>10}{'max diff':>12}")

    def row(label, N, call):
        times, outs = {}, {}
        for name, mod in backends.items():
            times[name], outs[name] = _best_of(lambda: call(mod), args.repeat)
        line = f"{label:<18}{N:>4}" + "".join(f"{times[k]:>11.4f}s" for k in backends)
        if len(backends) == 2:
            a, b = (np.asarray(outs[k][0], dtype=float) for k in ("cython", "python"))
            line += f"{times['python'] / times['cython']:>9.1f}x{np.max(np.abs(a - b)):>12.2e}"
        print(line)

    for N in (int(s) for s in args.sizes.split(",")):
        theta = np.arange(N) * 2 * np.pi / N
        row("segment_costs", N, lambda m: m.segment_costs(theta, sp, cp))
        cost, _ = backends["python"].segment_costs(theta, sp, cp)
        row("cyclic_partition", N, lambda m: m.cyclic_partition(cost, 6 if N >= 6 else N))
    for N in (6, 8):
        theta = np.arange(N) * 2 * np.pi / N
        row("subset_costs", N, lambda m: m.subset_costs(theta, sp, cp))


if __name__ == "__main__":
    main()

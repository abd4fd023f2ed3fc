"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--p 151] [--n 6]

Both backends must return identical results; the script refuses to report a
timing otherwise. The first numba call (JIT compile) is excluded.
"""

import argparse
import time

from qrteach import kernels
from qrteach.qr import build_qr


def best_of(fn, repeat):
    times, result = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def bench_scan(p, k):
    t = build_qr(p)
    lo, hi = 0, p - k + 1

    def run(backend):
        return kernels.scan_patterns(t.in_bits, t.out_bits, k, 1, True, lo, hi, False, backend)

    return f"scan QR-{p} strong k={k}", run


def bench_enum(n, k):
    def run(backend):
        return kernels.enumerate_orientations(n, k, False, symmetry_cut=False, backend=backend)

    return f"enumerate n={n} weak k={k}", run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--p", type=int, default=151)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--n", type=int, default=6)
    args = ap.parse_args()

    if not kernels.HAVE_NUMBA or kernels.NUMBA_DISABLED:
        print("numba unavailable or disabled; only the numpy backend would run")
        return

    cases = [bench_scan(args.p, args.k), bench_enum(args.n, 2)]
    print(f"{'case':32s} {'numba best':>11s} {'numpy best':>11s} {'speedup':>8s}")
    for name, run in cases:
        run("numba")  # compile
        nb_best, nb_res = best_of(lambda: run("numba"), args.repeat)
        np_best, np_res = best_of(lambda: run("numpy"), args.repeat)
        if nb_res != np_res:
            raise SystemExit(f"{name}: backends disagree ({nb_res} vs {np_res})")
        print(f"{name:32s} {nb_best:10.4f}s {np_best:10.4f}s {np_best / nb_best:7.1f}x")


if __name__ == "__main__":
    main()

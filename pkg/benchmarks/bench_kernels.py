"""Compare the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from chenloops import _fallback

try:
    from chenloops import _kernels
except ImportError:  # pragma: no cover
    _kernels = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    cases = [
        ("iterated_sum M=1152 T=96 r=2", "iterated_sum", (rng.normal(size=(1152, 96, 2)), np.full(96, 1 / 96))),
        ("iterated_sum M=64 T=768 r=3", "iterated_sum", (rng.normal(size=(64, 768, 3)), np.full(768, 1 / 768))),
    ]
    t = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    A = np.stack([np.cos(t), np.sin(t), 0 * t], 1)
    B = np.stack([1 + np.cos(t), 0 * t, np.sin(t)], 1)
    cases.append(("polygon_linking 400x400", "polygon_linking", (A, B)))
    print(f"{'kernel':34s} {'numpy [s]':>10s} {'cython [s]':>11s} {'speedup':>8s}")
    for label, name, inputs in cases:
        slow = best_of(lambda: getattr(_fallback, name)(*inputs), args.repeat)
        if _kernels is None:
            print(f"{label:34s} {slow:10.4f} {'n/a':>11s}")
            continue
        a = getattr(_fallback, name)(*inputs)
        b = getattr(_kernels, name)(*inputs)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12), label
        fast = best_of(lambda: getattr(_kernels, name)(*inputs), args.repeat)
        print(f"{label:34s} {slow:10.4f} {fast:11.4f} {slow / fast:7.1f}x")


if __name__ == "__main__":
    main()

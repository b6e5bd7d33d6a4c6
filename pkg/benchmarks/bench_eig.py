"""Benchmark the compiled Jacobi eigensolver kernel against the pure-Python
fallback (and LAPACK as a reference point).

Run:  python3 benchmarks/bench_eig.py [--sizes 8,16,32,64,96] [--repeats 3]
"""
import argparse
import time

import numpy as np

from tailwalk import _kernel_py

try:
    from tailwalk import _kernel_cy
except ImportError:
    _kernel_cy = None


def random_hermitian(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (m + m.conj().T) / 2.0


def best_time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="8,16,32,64,96",
                        help="comma-separated matrix sizes")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if _kernel_cy is None:
        print("compiled kernel not available; timing the fallback only")
    header = f"{'n':>5} {'python (s)':>12} {'cython (s)':>12} " \
             f"{'speedup':>8} {'lapack (s)':>12} {'max |dw|':>10}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        m = random_hermitian(n, seed=n)
        t_py = best_time(lambda: _kernel_py.jacobi_eigh(m), args.repeats)
        w_py, _, _ = _kernel_py.jacobi_eigh(m)
        t_la = best_time(lambda: np.linalg.eigh(m), args.repeats)
        if _kernel_cy is not None:
            t_cy = best_time(lambda: _kernel_cy.jacobi_eigh(m), args.repeats)
            w_cy, _, _ = _kernel_cy.jacobi_eigh(m)
            dw = float(np.max(np.abs(np.sort(w_py) - np.sort(w_cy))))
            print(f"{n:>5} {t_py:>12.6f} {t_cy:>12.6f} "
                  f"{t_py / t_cy:>8.1f} {t_la:>12.6f} {dw:>10.2e}")
        else:
            print(f"{n:>5} {t_py:>12.6f} {'-':>12} {'-':>8} "
                  f"{t_la:>12.6f} {'-':>10}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

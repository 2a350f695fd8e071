"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 512] [--repeat 3]

Each kernel is run on identical inputs by both backends; the table lists
the best wall time, the speed-up and the max abs difference of the outputs.
"""
import argparse
import time

import numpy as np

from kvnlab import _backend


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(n, rng):
    field = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    coef = _backend.spline_coefficients(field)
    fq = rng.uniform(0, n - 1, n * n)
    fs = rng.uniform(0, n - 1, n * n)
    q, p = rng.normal(size=n * n), rng.normal(size=n * n)
    x = np.linspace(-5, 5, 4 * n)
    nodes = np.sort(rng.uniform(-1, 1, 8 * n))
    w = rng.normal(size=8 * n) + 0j
    return {
        "bicubic sample": lambda b: _backend.sample(field, fq, fs, backend=b, coef=coef),
        "bilinear sample": lambda b: _backend.sample(field, fq, fs, "bilinear", backend=b),
        "rk4 backward flow": lambda b: np.stack(
            _backend.backward_flow_quadratic(q, p, 1.0, 1.0, 0.5, 100, backend=b)),
        "chirp sum": lambda b: _backend.chirp_sum(x, nodes, w, 3.0, backend=b),
    }


def run(n=512, repeat=3, seed=0):
    rows = []
    for name, fn in cases(n, np.random.default_rng(seed)).items():
        t_py, out_py = best_of(lambda: fn("python"), repeat)
        if _backend._compiled is None:
            rows.append((name, t_py, float("nan"), float("nan")))
            continue
        t_c, out_c = best_of(lambda: fn("compiled"), repeat)
        rows.append((name, t_py, t_c, float(np.abs(out_py - out_c).max())))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=512, help="grid side; point counts scale as n^2")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"grid {args.n}x{args.n}, threads={_backend.threads()}, compiled="
          f"{'yes' if _backend._compiled is not None else 'no'}")
    print(f"{'kernel':<20}{'python [s]':>12}{'compiled [s]':>14}{'speed-up':>10}{'max diff':>11}")
    for name, t_py, t_c, diff in run(args.n, args.repeat):
        print(f"{name:<20}{t_py:>12.4f}{t_c:>14.4f}{t_py / t_c:>10.1f}{diff:>11.1e}")


if __name__ == "__main__":
    main()

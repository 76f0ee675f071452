"""Time the numba and numpy flavours of each kernel side by side.

    python benchmarks/bench_kernels.py [--sizes 64 128 256] [--repeat 5]

JIT compilation is triggered once before timing and is not counted.
"""
import argparse
import timeit

import numpy as np

from gnfi import _accel, kernels
from gnfi.physics import GratingConfig, mode_basis
from gnfi.spectral import PeriodicGrid


def _transfer_args(n):
    cfg = GratingConfig(np.pi, 1.6 * np.pi, 0.025, 0.2, -0.2, PeriodicGrid(1, 1, n, n))
    b = mode_basis(cfg)
    return (b.alpha1.ravel().copy(), b.alpha2.ravel().copy(), b.beta_plus.ravel().copy(),
            b.beta_minus.ravel().copy(), np.pi, 1.6 * np.pi, 1.0, 0.0, 1e-9 * np.pi, 1e-9 * np.pi**2)


def _backprop_args(n, rng):
    m = n * n
    data = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    coeff = rng.standard_normal(m) + 1j * rng.standard_normal(m) + 3.0
    beta = 1j * rng.uniform(0, 50, m)
    keep = rng.uniform(size=m) < 0.5
    return data, coeff, beta, 0.2, 1.0, keep


def bench(sizes, repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n in sizes:
        cases = [
            ("transfer", kernels._transfer_numba, kernels._transfer_numpy, _transfer_args(n)),
            ("backpropagate", kernels._backpropagate_numba, kernels._backpropagate_numpy,
             _backprop_args(n, rng)),
        ]
        if n <= 64:
            vals = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            cases.append(("dft_direct", kernels._dft_direct_numba, kernels._dft_direct_numpy, (vals,)))
        for name, fast, slow, args in cases:
            fast(*args)  # warm-up / compile
            t_nb = min(timeit.repeat(lambda: fast(*args), number=1, repeat=repeat))
            t_np = min(timeit.repeat(lambda: slow(*args), number=1, repeat=repeat))
            rows.append((name, n, t_nb, t_np))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128, 256])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; both columns time the numpy path")
    print(f"{'kernel':<14s} {'N':>5s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speed-up':>9s}")
    for name, n, t_nb, t_np in bench(args.sizes, args.repeat):
        print(f"{name:<14s} {n:>5d} {1e3 * t_nb:>11.3f} {1e3 * t_np:>11.3f} {t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()

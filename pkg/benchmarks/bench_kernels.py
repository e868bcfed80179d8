"""Time the numba kernels against their numpy fallbacks.

Usage:  python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each kernel runs once per backend to warm up (numba compiles on first
call; the on-disk cache makes later runs cheap), then ``--repeat`` times.
The table shows the best wall time per backend and the largest difference
between the two results, which should sit at rounding level.
"""
import argparse
import time

import numpy as np

from kappa_fuzzy import _accel
from kappa_fuzzy.group import GridFunction, convolve
from kappa_fuzzy.numerics import eig_general, eig_hermitian
from kappa_fuzzy.special import bessel_j


def _case_jacobi(n):
    rng = np.random.default_rng(1)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = A + A.conj().T
    return lambda: eig_hermitian(H)[0]


def _case_qr(n):
    rng = np.random.default_rng(2)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return lambda: np.sort_complex(eig_general(A).eigenvalues)


def _case_convolution(m):
    t = np.linspace(-5, 5, m)
    y = np.linspace(-8, 8, m)
    f = GridFunction.sample(lambda T, Y: np.exp(-T ** 2 - Y ** 2 / 2), t, y)
    return lambda: convolve(f, f).values


def _case_bessel(n):
    x = np.linspace(0.1, 40.0, n)
    return lambda: bessel_j(0.3 + 0.4j, x)


def run(fn, repeat):
    fn()  # warm-up (compilation on the numba backend)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--quick", action="store_true", help="small sizes only")
    args = parser.parse_args()

    sizes = {"jacobi": 64, "qr": 96, "convolution": 32, "bessel": 2000} if args.quick else \
        {"jacobi": 128, "qr": 256, "convolution": 64, "bessel": 20000}
    cases = [
        (f"jacobi eig_hermitian n={sizes['jacobi']}", _case_jacobi(sizes["jacobi"])),
        (f"QR eig_general n={sizes['qr']}", _case_qr(sizes["qr"])),
        (f"group convolution {sizes['convolution']}^2", _case_convolution(sizes["convolution"])),
        (f"Bessel series {sizes['bessel']} points", _case_bessel(sizes["bessel"])),
    ]
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; only the numpy backend can run")
        return
    print(f"{'kernel':38s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s} {'max diff':>10s}")
    for name, fn in cases:
        with _accel.use_backend("numba"):
            t_nb, r_nb = run(fn, args.repeat)
        with _accel.use_backend("numpy"):
            t_np, r_np = run(fn, args.repeat)
        diff = float(np.max(np.abs(np.asarray(r_nb) - np.asarray(r_np))))
        print(f"{name:38s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()

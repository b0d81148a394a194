"""Time the compiled and numpy variants of each kernel on representative inputs.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from strongpert import _kernels as K


def cases(rng):
    n, d = 100_000, 2
    h = rng.normal(size=(n, d, d)) + 1j * rng.normal(size=(n, d, d))
    w, q = np.linalg.eigh((h + h.conj().transpose(0, 2, 1)) / 2)
    dts = np.full(n, 1e-3)
    psi0 = np.array([1, 0], dtype=complex)
    rec = np.zeros(n, dtype=bool)
    rec[::4] = True
    yield "step_sequence (1e5 steps, d=2)", "step_sequence", (w, q, dts, psi0, 1.0, rec)

    n, d = 2001, 8
    mats = rng.normal(size=(n, d, d)) + 1j * rng.normal(size=(n, d, d))
    phases = np.exp(1j * rng.uniform(0, 6, (n, d)))
    x = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
    yield "phased_kernel_apply (2001 x 8)", "phased_kernel_apply", (mats, phases, x, True)

    t = np.linspace(0, 10, 20001)
    y = rng.normal(size=(t.size, 16)) + 1j * rng.normal(size=(t.size, 16))
    yield "cumtrapz (20001 x 16)", "cumtrapz", (y, t)

    yield "bessel_table (order 200, x=150)", "bessel_table", (200, 150.0)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        print("numba is not installed; only the numpy path is available")
    print(f"{'kernel':36s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    for label, name, argv in cases(np.random.default_rng(0)):
        fn_np = getattr(K, "np_" + name)
        t_np = min(timeit.repeat(lambda: fn_np(*argv), number=1, repeat=args.repeat))
        if K.HAVE_NUMBA:
            fn_nb = getattr(K, "nb_" + name)
            fn_nb(*argv)  # compile or load from cache
            t_nb = min(timeit.repeat(lambda: fn_nb(*argv), number=1, repeat=args.repeat))
            print(f"{label:36s} {1e3 * t_np:11.2f} {1e3 * t_nb:11.2f} {t_np / t_nb:8.1f}")
        else:
            print(f"{label:36s} {1e3 * t_np:11.2f} {'-':>11s} {'-':>8s}")


if __name__ == "__main__":
    main()

"""Timing and agreement comparison of the compiled and pure-python kernels.

Usage: python3 benchmarks/bench_kernels.py [max_K]

For each truncation radius the three dense convolution kernels are run
through both available implementations on the same random mode data; the
outputs must agree bit-for-bit (identical operation order in both code
paths), and the wall times are reported side by side.
"""

import sys
import time

import numpy as np

from torusflow import kernels
from torusflow.lattice import WaveLattice


def random_modes(lattice, ncomp, seed):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((lattice.n_modes, ncomp)) * 1j
    z += rng.standard_normal((lattice.n_modes, ncomp))
    return z


def time_call(fn, *args, impl=None, repeats=3):
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args, impl=impl)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(max_k: int) -> int:
    impls = kernels.implementations()
    if "compiled" not in impls:
        print("compiled kernels unavailable; timing pure python only")
    names = sorted(impls)
    print(f"active backend: {kernels.backend_name()}")
    header = f"{'K':>3} {'pairs':>10} {'kernel':>18}"
    for n in names:
        header += f" {n + ' (s)':>14}"
    header += "   agreement"
    print(header)

    for k in range(2, max_k + 1):
        lat = WaveLattice(k)
        table = lat.pair_table
        a = random_modes(lat, 3, seed=2 * k)
        b = random_modes(lat, 3, seed=2 * k + 1)
        rows = [
            ("advect", kernels.advect_modes, (table, lat.modes, a, b)),
            ("grad_transpose", kernels.grad_transpose_modes, (table, lat.modes, a, b)),
            ("half_grad_sq", kernels.half_grad_sq_modes, (table, lat.modes, a)),
        ]
        for label, fn, args in rows:
            outs = {}
            times = {}
            for n in names:
                times[n], outs[n] = time_call(fn, *args, impl=impls[n])
            line = f"{k:>3} {len(table[0]):>10} {label:>18}"
            for n in names:
                line += f" {times[n]:>14.6f}"
            if len(names) == 2:
                exact = np.array_equal(outs[names[0]], outs[names[1]])
                line += "   bitwise" if exact else "   DIFFER"
            print(line)
    return 0


if __name__ == "__main__":
    max_k = int(sys.argv[1]) if len(sys.argv) > 1 else 8
    raise SystemExit(main(max_k))

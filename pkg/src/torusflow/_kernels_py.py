"""NumPy fallback for the dense-convolution kernels.

Mirrors torusflow._convkernels term for term: every per-pair product is
formed with the same operand order and the per-bucket accumulation
(np.bincount scans the pair list sequentially) matches the compiled
loop, so results agree bitwise with the extension.
"""

from __future__ import annotations

import numpy as np


def _scatter(io: np.ndarray, contrib: np.ndarray, out: np.ndarray) -> np.ndarray:
    """Accumulate pair contributions (npairs, 2C) into out (n, 2C)."""
    n = out.shape[0]
    for col in range(out.shape[1]):
        out[:, col] += np.bincount(io, weights=contrib[:, col], minlength=n)
    return out


def conv_advect(ia, ib, io, modes, a, b, out):
    """out[io] += i (a[ia] . k_b) * b[ib]  -- transport term (a.grad)b."""
    kb = modes[ib]
    dre = a[ia, 0] * kb[:, 0] + a[ia, 2] * kb[:, 1] + a[ia, 4] * kb[:, 2]
    dim = a[ia, 1] * kb[:, 0] + a[ia, 3] * kb[:, 1] + a[ia, 5] * kb[:, 2]
    fre = -dim
    fim = dre
    ncomp = b.shape[1] // 2
    contrib = np.empty((len(ia), 2 * ncomp))
    for m in range(ncomp):
        bre = b[ib, 2 * m]
        bim = b[ib, 2 * m + 1]
        contrib[:, 2 * m] = fre * bre - fim * bim
        contrib[:, 2 * m + 1] = fre * bim + fim * bre
    return _scatter(io, contrib, out)


def conv_grad_transpose(ia, ib, io, modes, a, b, out):
    """out[io, i] += i k_a[i] (a[ia] . b[ib])  -- (grad a)^T b."""
    sre = (
        (a[ia, 0] * b[ib, 0] - a[ia, 1] * b[ib, 1])
        + (a[ia, 2] * b[ib, 2] - a[ia, 3] * b[ib, 3])
        + (a[ia, 4] * b[ib, 4] - a[ia, 5] * b[ib, 5])
    )
    sim = (
        (a[ia, 0] * b[ib, 1] + a[ia, 1] * b[ib, 0])
        + (a[ia, 2] * b[ib, 3] + a[ia, 3] * b[ib, 2])
        + (a[ia, 4] * b[ib, 5] + a[ia, 5] * b[ib, 4])
    )
    fre = -sim
    fim = sre
    ka = modes[ia]
    contrib = np.empty((len(ia), 6))
    for m in range(3):
        contrib[:, 2 * m] = ka[:, m] * fre
        contrib[:, 2 * m + 1] = ka[:, m] * fim
    return _scatter(io, contrib, out)


def conv_half_grad_sq(ia, ib, io, modes, a, out):
    """out[io, i] += (i/2)(k_a + k_b)[i] (a[ia] . a[ib])  -- grad |a|^2 / 2."""
    sre = (
        (a[ia, 0] * a[ib, 0] - a[ia, 1] * a[ib, 1])
        + (a[ia, 2] * a[ib, 2] - a[ia, 3] * a[ib, 3])
        + (a[ia, 4] * a[ib, 4] - a[ia, 5] * a[ib, 5])
    )
    sim = (
        (a[ia, 0] * a[ib, 1] + a[ia, 1] * a[ib, 0])
        + (a[ia, 2] * a[ib, 3] + a[ia, 3] * a[ib, 2])
        + (a[ia, 4] * a[ib, 5] + a[ia, 5] * a[ib, 4])
    )
    fre = -0.5 * sim
    fim = 0.5 * sre
    contrib = np.empty((len(ia), 6))
    for m in range(3):
        km = modes[ia, m] + modes[ib, m]
        contrib[:, 2 * m] = km * fre
        contrib[:, 2 * m + 1] = km * fim
    return _scatter(io, contrib, out)

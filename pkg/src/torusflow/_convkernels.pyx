# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled dense-convolution kernels over wavenumber mode pairs.

Each routine accumulates over a precomputed pair table (ia, ib, io) with
modes[ia] + modes[ib] = modes[io].  Complex coefficient arrays are passed
as float64 views with interleaved (re, im) pairs along the last axis.
The arithmetic mirrors the NumPy fallback in torusflow._kernels_py
operation for operation (same products, same per-bucket accumulation
order), so the two implementations produce bitwise-identical results;
the extension is compiled with FP contraction disabled to keep it that way.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def conv_advect(
    const long long[::1] ia,
    const long long[::1] ib,
    const long long[::1] io,
    const double[:, ::1] modes,
    const double[:, ::1] a,
    const double[:, ::1] b,
    double[:, ::1] out,
):
    """out[io] += i (a[ia] . k_b) * b[ib]  -- transport term (a.grad)b."""
    cdef Py_ssize_t p, m, ncomp = b.shape[1] // 2
    cdef Py_ssize_t pa, pb, po
    cdef double dre, dim, fre, fim
    with nogil:
        for p in range(ia.shape[0]):
            pa = ia[p]
            pb = ib[p]
            po = io[p]
            dre = a[pa, 0] * modes[pb, 0] + a[pa, 2] * modes[pb, 1] \
                + a[pa, 4] * modes[pb, 2]
            dim = a[pa, 1] * modes[pb, 0] + a[pa, 3] * modes[pb, 1] \
                + a[pa, 5] * modes[pb, 2]
            # multiply by i
            fre = -dim
            fim = dre
            for m in range(ncomp):
                out[po, 2 * m] += fre * b[pb, 2 * m] - fim * b[pb, 2 * m + 1]
                out[po, 2 * m + 1] += fre * b[pb, 2 * m + 1] + fim * b[pb, 2 * m]
    return np.asarray(out)


def conv_grad_transpose(
    const long long[::1] ia,
    const long long[::1] ib,
    const long long[::1] io,
    const double[:, ::1] modes,
    const double[:, ::1] a,
    const double[:, ::1] b,
    double[:, ::1] out,
):
    """out[io, i] += i k_a[i] (a[ia] . b[ib])  -- (grad a)^T b."""
    cdef Py_ssize_t p, m
    cdef Py_ssize_t pa, pb, po
    cdef double sre, sim, fre, fim, km
    with nogil:
        for p in range(ia.shape[0]):
            pa = ia[p]
            pb = ib[p]
            po = io[p]
            sre = (a[pa, 0] * b[pb, 0] - a[pa, 1] * b[pb, 1]) \
                + (a[pa, 2] * b[pb, 2] - a[pa, 3] * b[pb, 3]) \
                + (a[pa, 4] * b[pb, 4] - a[pa, 5] * b[pb, 5])
            sim = (a[pa, 0] * b[pb, 1] + a[pa, 1] * b[pb, 0]) \
                + (a[pa, 2] * b[pb, 3] + a[pa, 3] * b[pb, 2]) \
                + (a[pa, 4] * b[pb, 5] + a[pa, 5] * b[pb, 4])
            fre = -sim
            fim = sre
            for m in range(3):
                km = modes[pa, m]
                out[po, 2 * m] += km * fre
                out[po, 2 * m + 1] += km * fim
    return np.asarray(out)


def conv_half_grad_sq(
    const long long[::1] ia,
    const long long[::1] ib,
    const long long[::1] io,
    const double[:, ::1] modes,
    const double[:, ::1] a,
    double[:, ::1] out,
):
    """out[io, i] += (i/2)(k_a + k_b)[i] (a[ia] . a[ib])  -- grad |a|^2 / 2."""
    cdef Py_ssize_t p, m
    cdef Py_ssize_t pa, pb, po
    cdef double sre, sim, fre, fim, km
    with nogil:
        for p in range(ia.shape[0]):
            pa = ia[p]
            pb = ib[p]
            po = io[p]
            sre = (a[pa, 0] * a[pb, 0] - a[pa, 1] * a[pb, 1]) \
                + (a[pa, 2] * a[pb, 2] - a[pa, 3] * a[pb, 3]) \
                + (a[pa, 4] * a[pb, 4] - a[pa, 5] * a[pb, 5])
            sim = (a[pa, 0] * a[pb, 1] + a[pa, 1] * a[pb, 0]) \
                + (a[pa, 2] * a[pb, 3] + a[pa, 3] * a[pb, 2]) \
                + (a[pa, 4] * a[pb, 5] + a[pa, 5] * a[pb, 4])
            fre = -0.5 * sim
            fim = 0.5 * sre
            for m in range(3):
                km = modes[pa, m] + modes[pb, m]
                out[po, 2 * m] += km * fre
                out[po, 2 * m + 1] += km * fim
    return np.asarray(out)

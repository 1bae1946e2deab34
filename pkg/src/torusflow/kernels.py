"""Backend selection for the dense-convolution kernels.

The compiled Cython extension is preferred when present; the NumPy
fallback implements identical arithmetic.  Set ``TORUSFLOW_KERNELS=python``
to force the fallback (used by the benchmark and the agreement tests).
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

try:  # pragma: no cover - exercised indirectly
    from . import _convkernels as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

_FORCED = os.environ.get("TORUSFLOW_KERNELS", "").strip().lower()
if _FORCED == "python" or _compiled is None:
    _impl = _kernels_py
    BACKEND = "python"
else:
    _impl = _compiled
    BACKEND = "compiled"


def backend_name() -> str:
    return BACKEND


def _as_interleaved(coeffs: np.ndarray) -> np.ndarray:
    """View complex (n, C) coefficients as float64 (n, 2C), re/im interleaved."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    return coeffs.view(np.float64)


def _run(func, table, modes, *coeff_args, ncomp_out: int, n: int):
    ia, ib, io = (np.ascontiguousarray(x, dtype=np.int64) for x in table)
    modes = np.ascontiguousarray(modes, dtype=np.float64)
    out = np.zeros((n, 2 * ncomp_out))
    args = [_as_interleaved(c) for c in coeff_args]
    func(ia, ib, io, modes, *args, out)
    return out.view(np.complex128)


def advect_modes(table, modes, a, b, impl=None) -> np.ndarray:
    """Truncated convolution of (a . grad) b over the pair table."""
    mod = impl or _impl
    return _run(mod.conv_advect, table, modes, a, b, ncomp_out=b.shape[1], n=b.shape[0])


def grad_transpose_modes(table, modes, a, b, impl=None) -> np.ndarray:
    """Truncated convolution of (grad a)^T b over the pair table."""
    mod = impl or _impl
    return _run(mod.conv_grad_transpose, table, modes, a, b, ncomp_out=3, n=b.shape[0])


def half_grad_sq_modes(table, modes, a, impl=None) -> np.ndarray:
    """Truncated convolution of grad(|a|^2)/2 over the pair table."""
    mod = impl or _impl
    return _run(mod.conv_half_grad_sq, table, modes, a, ncomp_out=3, n=a.shape[0])


def implementations() -> dict[str, object]:
    """Available kernel implementations keyed by name (for benchmarks/tests)."""
    impls: dict[str, object] = {"python": _kernels_py}
    if _compiled is not None:
        impls["compiled"] = _compiled
    return impls

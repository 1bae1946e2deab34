"""Dense-convolution reference dynamics on the raw mode list.

This path never touches an FFT: quadratic terms are summed directly over
the lattice pair table, the Leray projection and heat factors act on the
per-mode coefficient list.  It reproduces the semantics of the
pseudospectral path exactly (products truncated to the same ball, same
zero-mode rule), which makes it an independent oracle for the solver.
Cost grows like the square of the mode count, so it is restricted to
small truncation radii.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .dynamics import check_tag
from .lattice import WaveLattice

ORACLE_MAX_WAVENUMBER = 4


def _check_small(lattice: WaveLattice) -> None:
    if lattice.max_wavenumber > ORACLE_MAX_WAVENUMBER:
        raise ValueError(
            f"oracle restricted to K <= {ORACLE_MAX_WAVENUMBER} "
            f"(got K={lattice.max_wavenumber})"
        )


def leray_modes(lattice: WaveLattice, coeffs: np.ndarray) -> np.ndarray:
    """Per-mode divergence-free projection; zero mode passes through."""
    k = lattice.modes.astype(np.float64)
    ksq = lattice.mode_ksq.copy()
    ksq[ksq == 0.0] = 1.0
    kdot = np.einsum("nj,nj->n", k, coeffs)
    scale = kdot / ksq
    scale[lattice.mode_ksq == 0.0] = 0.0
    return coeffs - k * scale[:, None]


def advect_modes(lattice: WaveLattice, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a . grad) b as a truncated convolution over the pair table."""
    return kernels.advect_modes(
        lattice.pair_table, lattice.modes.astype(np.float64), a, b
    )


def grad_transpose_modes(lattice: WaveLattice, a, b) -> np.ndarray:
    """(grad a)^T b as a truncated convolution over the pair table."""
    return kernels.grad_transpose_modes(
        lattice.pair_table, lattice.modes.astype(np.float64), a, b
    )


def half_grad_sq_modes(lattice: WaveLattice, a) -> np.ndarray:
    """grad(|a|^2)/2 as a truncated convolution over the pair table."""
    return kernels.half_grad_sq_modes(
        lattice.pair_table, lattice.modes.astype(np.float64), a
    )


def oracle_nonlinear(
    tag: str,
    lattice: WaveLattice,
    coeffs: np.ndarray,
    t: float = 0.0,
    u_at=None,
) -> np.ndarray:
    """Nonlinear right-hand side on the mode list, matching dynamics.nonlinear_rhs."""
    check_tag(tag)
    _check_small(lattice)
    if tag == "linear_fixed_u":
        if u_at is None:
            raise ValueError("linear_fixed_u needs a prescribed velocity sampler")
        u = u_at(t)
        out = -(advect_modes(lattice, u, coeffs) + grad_transpose_modes(lattice, u, coeffs))
    elif tag == "nse":
        u = leray_modes(lattice, coeffs)
        out = -leray_modes(lattice, advect_modes(lattice, u, u))
    elif tag == "magnetization":
        u = leray_modes(lattice, coeffs)
        out = -(advect_modes(lattice, u, coeffs) + grad_transpose_modes(lattice, u, coeffs))
    elif tag == "simplified":
        u = leray_modes(lattice, coeffs)
        out = -(advect_modes(lattice, u, coeffs) + half_grad_sq_modes(lattice, coeffs))
    elif tag == "burgers":
        out = -advect_modes(lattice, coeffs, coeffs)
    else:  # toy
        u = leray_modes(lattice, coeffs)
        out = -grad_transpose_modes(lattice, u, coeffs)
    if tag in ("nse", "simplified"):
        out[lattice.mode_ksq == 0.0] = 0.0
    return out


def oracle_rhs(
    tag: str,
    lattice: WaveLattice,
    coeffs: np.ndarray,
    nu: float = 1.0,
    t: float = 0.0,
    u_at=None,
) -> np.ndarray:
    """Full right-hand side including -nu |k|^2 w on the mode list."""
    out = oracle_nonlinear(tag, lattice, coeffs, t=t, u_at=u_at)
    return out - nu * lattice.mode_ksq[:, None] * coeffs


def galerkin_ode_oracle(
    tag: str,
    lattice: WaveLattice,
    coeffs0: np.ndarray,
    dt: float,
    n_steps: int,
    nu: float = 1.0,
    u_at=None,
):
    """March the mode-list ODE with the same integrating-factor RK4 scheme.

    Returns (times, states) with one (n_modes, 3) snapshot per step,
    including the initial state.
    """
    _check_small(lattice)
    decay = nu * lattice.mode_ksq[:, None]
    e_half = np.exp(-decay * (0.5 * dt))
    e_full = e_half * e_half

    def nl(c, t):
        return oracle_nonlinear(tag, lattice, c, t=t, u_at=u_at)

    w = np.array(coeffs0, dtype=np.complex128)
    times = [0.0]
    states = [w.copy()]
    for i in range(n_steps):
        t = i * dt
        k1 = nl(w, t)
        k2 = nl(e_half * (w + (0.5 * dt) * k1), t + 0.5 * dt)
        k3 = nl(e_half * w + (0.5 * dt) * k2, t + 0.5 * dt)
        k4 = nl(e_full * w + dt * (e_half * k3), t + dt)
        w = e_full * w + (dt / 6.0) * (e_full * k1 + 2.0 * (e_half * (k2 + k3)) + k4)
        times.append((i + 1) * dt)
        states.append(w.copy())
    return np.asarray(times), states

"""Right-hand sides of the six evolution systems on the mode ball.

All quadratic terms are evaluated pseudospectrally: differentiate with ik
multipliers, multiply on the collocation grid, transform back and restrict
to the ball |k| <= K.  With the lattice's dealiasing-safe grid this equals
the exact truncated convolution, so identities that hold for full products
survive the truncation up to a pure-gradient remainder.

Systems (u = Leray projection of w, Lambda^2 = -Laplacian):

    nse            dw/dt = -P[(w.grad)w]                     - nu Lambda^2 w
    magnetization  dw/dt = -(u.grad)w - (grad u)^T w          - nu Lambda^2 w
    linear_fixed_u dw/dt = -(U.grad)w - (grad U)^T w          - nu Lambda^2 w
    simplified     dw/dt = -(u.grad)w - grad(|w|^2)/2         - nu Lambda^2 w
    burgers        dw/dt = -(w.grad)w                         - nu Lambda^2 w
    toy            dw/dt = -(grad u)^T w                      - nu Lambda^2 w

with U a prescribed, time-interpolated velocity.  For the nse and
simplified systems the zero mode of the right-hand side vanishes
identically (transport by a divergence-free field plus gradients), and it
is set to exactly zero so the discrete flow conserves momentum bitwise.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.fft as sfft

from .lattice import WaveLattice
from .spectral import FourierField, leray_project

SYSTEM_TAGS = ("nse", "magnetization", "linear_fixed_u", "simplified", "burgers", "toy")

#: Systems whose right-hand side has an identically vanishing zero mode.
MOMENTUM_CONSERVING = frozenset({"nse", "simplified"})

DIVERGENCE_WARN_THRESHOLD = 1e-10


def check_tag(tag: str) -> str:
    if tag not in SYSTEM_TAGS:
        raise ValueError(f"unknown system tag {tag!r}; expected one of {SYSTEM_TAGS}")
    return tag


def _same_lattice(a: FourierField, b: FourierField) -> None:
    if a.lattice != b.lattice:
        raise ValueError("fields live on different lattices")


# ----------------------------------------------------------------------
# pseudospectral product machinery
# ----------------------------------------------------------------------


def _to_grids(lattice: WaveLattice, spec_stack: np.ndarray) -> np.ndarray:
    """Batched inverse transform to real collocation values."""
    m = lattice.grid_size
    return sfft.irfftn(spec_stack * float(m**3), s=(m, m, m), axes=(1, 2, 3), workers=-1)


def _from_grids(lattice: WaveLattice, grids: np.ndarray) -> np.ndarray:
    """Batched forward transform, restricted to the ball."""
    m = lattice.grid_size
    spec = sfft.rfftn(grids, axes=(1, 2, 3), workers=-1) / float(m**3)
    spec[:, ~lattice.ball_mask] = 0.0
    return spec


def _grad_stack(lattice: WaveLattice, spec: np.ndarray) -> np.ndarray:
    """All partial derivatives i k_i f_c as a flat stack (c*3 + i, ...)."""
    kvec = (lattice.k1, lattice.k2, lattice.k3)
    parts = [1j * kvec[i] * comp for comp in spec for i in range(3)]
    return np.stack(parts)


def advect(u: FourierField, f: FourierField) -> FourierField:
    """Transport term (u . grad) f, dealiased; f may be scalar or vector."""
    if u.ncomp != 3:
        raise ValueError("advecting velocity must have 3 components")
    _same_lattice(u, f)
    lat = u.lattice
    ncomp = f.ncomp
    grids = _to_grids(lat, np.concatenate([u.spec, _grad_stack(lat, f.spec)]))
    ug = grids[:3]
    df = grids[3:].reshape(ncomp, 3, *grids.shape[1:])  # df[c, i] = d_i f_c
    prod = np.einsum("ixyz,cixyz->cxyz", ug, df)
    return FourierField(lat, _from_grids(lat, prod))


def grad_transpose_mul(u: FourierField, f: FourierField) -> FourierField:
    """Stretching term (grad u)^T f with components sum_j (d_i u_j) f_j."""
    if u.ncomp != 3 or f.ncomp != 3:
        raise ValueError("grad_transpose_mul needs two 3-component fields")
    _same_lattice(u, f)
    lat = u.lattice
    grids = _to_grids(lat, np.concatenate([_grad_stack(lat, u.spec), f.spec]))
    du = grids[:9].reshape(3, 3, *grids.shape[1:])  # du[j, i] = d_i u_j
    fg = grids[9:]
    prod = np.einsum("jixyz,jxyz->ixyz", du, fg)
    return FourierField(lat, _from_grids(lat, prod))


def grad_half_sq(f: FourierField) -> FourierField:
    """Gradient of |f|^2 / 2, computed from the dealiased square."""
    if f.ncomp != 3:
        raise ValueError("grad_half_sq needs a 3-component field")
    lat = f.lattice
    fg = _to_grids(lat, f.spec)
    sq = 0.5 * np.einsum("cxyz,cxyz->xyz", fg, fg)
    shat = _from_grids(lat, sq[None])[0]
    spec = 1j * np.stack([lat.k1 * shat, lat.k2 * shat, lat.k3 * shat])
    return FourierField(lat, spec)


def pressure_from_velocity(u: FourierField) -> FourierField:
    """Pressure with zero-mean gauge: phat_k = i (k . Nhat_k)/|k|^2, N = (u.grad)u."""
    lat = u.lattice
    defect = divergence_linf(u)
    if defect > DIVERGENCE_WARN_THRESHOLD:
        warnings.warn(
            f"pressure_from_velocity: input divergence {defect:.3e} exceeds "
            f"{DIVERGENCE_WARN_THRESHOLD:.0e}",
            stacklevel=2,
        )
    nspec = advect(u, u).spec
    kdot = lat.k1 * nspec[0] + lat.k2 * nspec[1] + lat.k3 * nspec[2]
    phat = 1j * kdot / lat.ksq_safe
    phat[0, 0, 0] = 0.0
    return FourierField(lat, phat[None])


def divergence_linf(u: FourierField) -> float:
    """Max modulus of the divergence coefficients (cheap spectral check)."""
    lat = u.lattice
    d = lat.k1 * u.spec[0] + lat.k2 * u.spec[1] + lat.k3 * u.spec[2]
    return float(np.max(np.abs(d)))


# ----------------------------------------------------------------------
# prescribed velocity trajectories
# ----------------------------------------------------------------------


class PrescribedVelocity:
    """Velocity snapshots with piecewise-linear interpolation in coefficients."""

    def __init__(self, lattice: WaveLattice, times, specs):
        times = np.asarray(times, dtype=np.float64)
        if times.ndim != 1 or len(times) < 1:
            raise ValueError("need at least one snapshot time")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("snapshot times must be strictly increasing")
        self.lattice = lattice
        self.times = times
        self.specs = [np.asarray(s) for s in specs]
        if len(self.specs) != len(times):
            raise ValueError("times and snapshots disagree in length")

    @classmethod
    def from_fields(cls, times, fields) -> "PrescribedVelocity":
        fields = list(fields)
        return cls(fields[0].lattice, times, [f.spec for f in fields])

    def at(self, t: float, tol: float = 1e-9) -> FourierField:
        """Linear interpolation; times outside the range are clamped within tol."""
        times = self.times
        if t < times[0] - tol or t > times[-1] + tol:
            raise ValueError(
                f"time {t} outside prescribed range [{times[0]}, {times[-1]}]"
            )
        if len(times) == 1:
            return FourierField(self.lattice, self.specs[0].copy())
        t = min(max(t, times[0]), times[-1])
        i = int(np.searchsorted(times, t, side="right") - 1)
        i = min(max(i, 0), len(times) - 2)
        ta, tb = times[i], times[i + 1]
        theta = (t - ta) / (tb - ta)
        spec = (1.0 - theta) * self.specs[i] + theta * self.specs[i + 1]
        return FourierField(self.lattice, spec)


# ----------------------------------------------------------------------
# right-hand sides
# ----------------------------------------------------------------------


def nonlinear_rhs(
    tag: str,
    w: FourierField,
    t: float = 0.0,
    u_traj: PrescribedVelocity | None = None,
) -> FourierField:
    """Nonlinear (non-viscous) part of the right-hand side for one system."""
    check_tag(tag)
    if tag == "linear_fixed_u":
        if u_traj is None:
            raise ValueError("linear_fixed_u needs an attached prescribed velocity")
        u = u_traj.at(t)
        out = -(advect(u, w) + grad_transpose_mul(u, w))
    elif tag == "nse":
        u = leray_project(w)
        out = -leray_project(advect(u, u))
    elif tag == "magnetization":
        u = leray_project(w)
        out = -(advect(u, w) + grad_transpose_mul(u, w))
    elif tag == "simplified":
        u = leray_project(w)
        out = -(advect(u, w) + grad_half_sq(w))
    elif tag == "burgers":
        out = -advect(w, w)
    else:  # toy
        u = leray_project(w)
        out = -grad_transpose_mul(u, w)
    if tag in MOMENTUM_CONSERVING:
        out.spec[:, 0, 0, 0] = 0.0
    return out


def rhs(
    tag: str,
    w: FourierField,
    nu: float = 1.0,
    t: float = 0.0,
    u_traj: PrescribedVelocity | None = None,
) -> FourierField:
    """Full right-hand side including the viscous term -nu Lambda^2 w."""
    out = nonlinear_rhs(tag, w, t=t, u_traj=u_traj)
    return FourierField(w.lattice, out.spec - nu * w.lattice.ksq * w.spec)


def exact_product_lattice(lattice: WaveLattice) -> WaveLattice:
    """Enlarged lattice (radius 2K+1) on which products of K-fields are exact."""
    return WaveLattice(2 * lattice.max_wavenumber + 1)

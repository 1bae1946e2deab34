"""Truncated Fourier fields on the 3-torus and the spectral operators on them.

Coefficients follow the convention ``f(x) = sum_k fhat_k exp(i k.x)`` and are
stored on the rfftn half-spectrum layout (see :mod:`torusflow.lattice`), so
fields are real-valued by construction.  All norms carry the torus volume
factor (2 pi)^3:

    ||f||_s      = ( (2pi)^3 sum_{k != 0} |k|^{2s} |fhat_k|^2 )^{1/2}
    ||f||_{H^s}  = ( (2pi)^3 sum_k (1 + |k|^{2s}) |fhat_k|^2 )^{1/2}

The fractional Laplacian ``Lambda^s`` is the multiplier |k|^s acting mode by
mode; the zero mode is annihilated for s != 0 and passed through for s = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .lattice import TORUS_VOLUME, WaveLattice

#: Admissible exponent range for Lambda^s.
SOBOLEV_RANGE = (-2.0, 6.0)


def _check_exponent(s: float, lower: float = SOBOLEV_RANGE[0]) -> float:
    s = float(s)
    if not (lower <= s <= SOBOLEV_RANGE[1]):
        raise ValueError(
            f"Sobolev exponent {s} outside supported range "
            f"[{lower}, {SOBOLEV_RANGE[1]}]"
        )
    return s


@dataclass(frozen=True)
class FourierField:
    """A real vector or scalar field held as truncated Fourier coefficients.

    ``spec`` has shape (ncomp, M, M, M//2+1) and is structurally zero
    outside the lattice ball.  Instances are immutable; operators return
    new fields.
    """

    lattice: WaveLattice
    spec: np.ndarray

    def __post_init__(self):
        if self.spec.ndim != 4 or self.spec.shape[1:] != self.lattice.shape:
            raise ValueError(
                f"coefficient array shape {self.spec.shape} does not match "
                f"lattice {self.lattice!r}"
            )
        if self.spec.dtype != np.complex128:
            object.__setattr__(self, "spec", self.spec.astype(np.complex128))

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def zeros(cls, lattice: WaveLattice, ncomp: int = 3) -> "FourierField":
        return cls(lattice, np.zeros((ncomp,) + lattice.shape, dtype=np.complex128))

    @classmethod
    def from_values(cls, lattice: WaveLattice, values: np.ndarray) -> "FourierField":
        """Forward transform of real grid samples, truncated to the ball."""
        values = np.asarray(values, dtype=np.float64)
        if values.ndim == 3:
            values = values[None]
        m = lattice.grid_size
        if values.shape[1:] != (m, m, m):
            raise ValueError(f"grid shape {values.shape} does not match M={m}")
        spec = sfft.rfftn(values, axes=(1, 2, 3), workers=-1) / float(m**3)
        spec[:, ~lattice.ball_mask] = 0.0
        return cls(lattice, spec)

    @classmethod
    def from_modes(cls, lattice: WaveLattice, coeffs: np.ndarray) -> "FourierField":
        """Build a field from per-mode coefficients in lattice order."""
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.ndim == 1:
            coeffs = coeffs[:, None]
        if coeffs.shape[0] != lattice.n_modes:
            raise ValueError("coefficient list length does not match lattice")
        return cls(lattice, lattice.pack_modes(coeffs))

    # ------------------------------------------------------------------
    # basic accessors
    # ------------------------------------------------------------------

    @property
    def ncomp(self) -> int:
        return self.spec.shape[0]

    def values(self, grid_size: int | None = None) -> np.ndarray:
        """Real collocation values, optionally on a finer grid (zero padding)."""
        m = self.lattice.grid_size
        spec = self.spec
        if grid_size is not None and grid_size != m:
            if grid_size < m:
                raise ValueError("refinement grid must be at least the lattice grid")
            spec = _pad_spectrum(self.lattice, spec, grid_size)
            m_out = grid_size
        else:
            m_out = m
        vals = sfft.irfftn(
            spec * float(m_out**3), s=(m_out, m_out, m_out), axes=(1, 2, 3), workers=-1
        )
        return vals

    def mode_coefficients(self) -> np.ndarray:
        """Per-mode coefficients (n_modes, ncomp) in lattice order."""
        return self.lattice.extract_modes(self.spec)

    def zeroth_mode(self) -> np.ndarray:
        """The mean of the field, exactly as stored (real part of k = 0)."""
        return self.spec[:, 0, 0, 0].real.copy()

    def hermitian_defect(self) -> float:
        """Largest violation of fhat(-k) = conj(fhat(k)) on the stored plane.

        Only the k3 = 0 plane can break the symmetry in this layout.
        """
        plane = self.spec[:, :, :, 0]
        mirrored = np.conj(plane[:, ::-1, ::-1])
        mirrored = np.roll(mirrored, shift=(1, 1), axis=(1, 2))
        return float(np.max(np.abs(plane - mirrored))) if plane.size else 0.0

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.spec.view(np.float64))))

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------

    def _like(self, spec: np.ndarray) -> "FourierField":
        return FourierField(self.lattice, spec)

    def __add__(self, other: "FourierField") -> "FourierField":
        self._compat(other)
        return self._like(self.spec + other.spec)

    def __sub__(self, other: "FourierField") -> "FourierField":
        self._compat(other)
        return self._like(self.spec - other.spec)

    def __mul__(self, scalar: float) -> "FourierField":
        return self._like(self.spec * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "FourierField":
        return self._like(-self.spec)

    def _compat(self, other: "FourierField") -> None:
        if other.lattice != self.lattice or other.ncomp != self.ncomp:
            raise ValueError("fields live on different lattices or component counts")


# ----------------------------------------------------------------------
# spectral padding / lattice transfer
# ----------------------------------------------------------------------


def _pad_spectrum(lattice: WaveLattice, spec: np.ndarray, m_out: int) -> np.ndarray:
    """Zero-pad half-spectrum coefficients onto a finer grid of size m_out."""
    m = lattice.grid_size
    rowmap = lattice.freq_full % m_out
    out = np.zeros((spec.shape[0], m_out, m_out, m_out // 2 + 1), dtype=np.complex128)
    ix = np.ix_(range(spec.shape[0]), rowmap, rowmap, range(lattice.half_size))
    out[ix] = spec
    return out


def resample(f: FourierField, target: WaveLattice) -> FourierField:
    """Transfer a field between lattices, truncating or zero-extending modes."""
    if target == f.lattice:
        return FourierField(f.lattice, f.spec.copy())
    src = f.lattice
    coeffs = f.mode_coefficients()
    k = target.max_wavenumber
    inside = src.mode_ksq <= k * k
    out = np.zeros((target.n_modes, f.ncomp), dtype=np.complex128)
    side = 2 * k + 1
    lookup = np.full((side, side, side), -1, dtype=np.int64)
    lookup[
        target.modes[:, 0] + k, target.modes[:, 1] + k, target.modes[:, 2] + k
    ] = np.arange(target.n_modes)
    src_modes = src.modes[inside]
    idx = lookup[src_modes[:, 0] + k, src_modes[:, 1] + k, src_modes[:, 2] + k]
    out[idx] = coeffs[inside]
    return FourierField.from_modes(target, out)


# ----------------------------------------------------------------------
# multiplier operators
# ----------------------------------------------------------------------


def lambda_pow(f: FourierField, s: float) -> FourierField:
    """Fractional Laplacian Lambda^s = |k|^s; annihilates the mean for s != 0."""
    s = _check_exponent(s)
    if s == 0.0:
        return FourierField(f.lattice, f.spec.copy())
    lat = f.lattice
    mult = lat.ksq_safe ** (0.5 * s)
    mult = np.where(lat.ksq > 0.0, mult, 0.0)
    return f._like(f.spec * mult)


def galerkin_project(f: FourierField, n: int) -> FourierField:
    """Restrict to modes |k| <= n (P_n); requires 0 <= n <= K."""
    if not 0 <= n <= f.lattice.max_wavenumber:
        raise ValueError(f"projection radius {n} outside [0, K]")
    keep = f.lattice.ksq <= float(n * n)
    return f._like(np.where(keep[None], f.spec, 0.0))


def leray_project(f: FourierField) -> FourierField:
    """Divergence-free projection: fhat - k (k.fhat)/|k|^2, mean untouched."""
    if f.ncomp != 3:
        raise ValueError("Leray projection needs a 3-component field")
    lat = f.lattice
    kdot = lat.k1 * f.spec[0] + lat.k2 * f.spec[1] + lat.k3 * f.spec[2]
    scale = kdot / lat.ksq_safe
    scale[0, 0, 0] = 0.0  # zero mode passes through
    spec = np.stack(
        [
            f.spec[0] - lat.k1 * scale,
            f.spec[1] - lat.k2 * scale,
            f.spec[2] - lat.k3 * scale,
        ]
    )
    return f._like(spec)


def gradient(q: FourierField) -> FourierField:
    """Spectral gradient of a scalar field."""
    if q.ncomp != 1:
        raise ValueError("gradient expects a scalar field")
    lat = q.lattice
    s = q.spec[0]
    return FourierField(lat, 1j * np.stack([lat.k1 * s, lat.k2 * s, lat.k3 * s]))


def divergence(f: FourierField) -> FourierField:
    """Spectral divergence of a vector field (scalar result)."""
    if f.ncomp != 3:
        raise ValueError("divergence expects a 3-component field")
    lat = f.lattice
    d = 1j * (lat.k1 * f.spec[0] + lat.k2 * f.spec[1] + lat.k3 * f.spec[2])
    return FourierField(lat, d[None])


def helmholtz_decompose(
    f: FourierField,
) -> tuple[FourierField, FourierField, np.ndarray]:
    """Split f = divfree + grad(q) + mean with mean-free parts.

    Returns ``(divfree, q, mean)`` where q is the scalar potential with
    qhat_k = -i (k.fhat_k)/|k|^2 and mean is the constant 3-vector.
    """
    if f.ncomp != 3:
        raise ValueError("Helmholtz decomposition needs a 3-component field")
    lat = f.lattice
    mean = f.zeroth_mode()
    kdot = lat.k1 * f.spec[0] + lat.k2 * f.spec[1] + lat.k3 * f.spec[2]
    qhat = -1j * kdot / lat.ksq_safe
    qhat[0, 0, 0] = 0.0
    q = FourierField(lat, qhat[None])
    divfree_spec = leray_project(f).spec.copy()
    divfree_spec[:, 0, 0, 0] = 0.0
    return FourierField(lat, divfree_spec), q, mean


# ----------------------------------------------------------------------
# norms and inner products
# ----------------------------------------------------------------------


def _weighted_sum(f: FourierField, mult: np.ndarray) -> float:
    lat = f.lattice
    power = (f.spec.real**2 + f.spec.imag**2) * lat.pair_weight
    return float(TORUS_VOLUME * np.sum(power * mult))


def sobolev_seminorm(f: FourierField, s: float) -> float:
    """Homogeneous norm ||f||_s over the nonzero modes; s in [0, 6]."""
    s = _check_exponent(s, lower=0.0)
    lat = f.lattice
    mult = np.where(lat.ksq > 0.0, lat.ksq_safe**s, 0.0)
    return float(np.sqrt(_weighted_sum(f, mult)))


def hs_norm(f: FourierField, s: float) -> float:
    """Full Sobolev norm with weight (1 + |k|^{2s}); H^0 is plain L^2."""
    s = _check_exponent(s, lower=0.0)
    if s == 0.0:
        return l2_norm(f)
    lat = f.lattice
    mult = 1.0 + np.where(lat.ksq > 0.0, lat.ksq_safe**s, 0.0)
    return float(np.sqrt(_weighted_sum(f, mult)))


def l2_norm(f: FourierField) -> float:
    """L^2 norm including the mean mode."""
    return float(np.sqrt(_weighted_sum(f, 1.0)))


def l2_inner(f: FourierField, g: FourierField) -> float:
    """Real L^2 pairing (f, g) = (2pi)^3 sum_k fhat_k . conj(ghat_k)."""
    f._compat(g)
    lat = f.lattice
    prod = (f.spec * np.conj(g.spec)).real * lat.pair_weight
    return float(TORUS_VOLUME * np.sum(prod))


def linf_norm(f: FourierField, refine: int = 1) -> float:
    """Grid supremum of the pointwise Euclidean modulus.

    This is a lower bound for the true supremum; ``refine`` evaluates on a
    refine-times finer grid, which tightens the bound quadratically for
    band-limited fields.
    """
    if refine < 1:
        raise ValueError("refine must be >= 1")
    vals = f.values(grid_size=refine * f.lattice.grid_size)
    mod_sq = np.einsum("cxyz,cxyz->xyz", vals, vals)
    return float(np.sqrt(np.max(mod_sq)))

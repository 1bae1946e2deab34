"""Spherically truncated wavenumber lattice on the 3-torus [0, 2pi)^3.

A :class:`WaveLattice` fixes the retained Fourier modes ``|k| <= K``
(Euclidean truncation) together with the collocation grid used for
pseudospectral products.  Coefficients are carried on the half-spectrum
layout of ``numpy.fft.rfftn`` (last axis k3 >= 0); real fields are
represented exactly and Hermitian symmetry ``f(-k) = conj(f(k))`` is
structural for every operation that goes through the grid.

The grid size per axis defaults to the smallest even integer ``M >= 3K+1``
so that quadratic products of ball-limited fields, restricted back to the
ball, are free of aliasing (2/3-rule with spherical truncation).
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

#: Volume of the torus, used in all norm and inner-product weights.
TORUS_VOLUME = (2.0 * np.pi) ** 3


def default_grid_size(max_wavenumber: int) -> int:
    """Smallest even grid size satisfying the dealiasing bound M >= 3K+1."""
    m = 3 * max_wavenumber + 1
    return m + (m % 2)


class WaveLattice:
    """Mode bookkeeping for the ball ``|k| <= K`` on an M^3 grid.

    Parameters
    ----------
    max_wavenumber:
        Truncation radius K (Euclidean norm of the integer wavevector).
    grid_size:
        Collocation points per axis.  Defaults to the dealiasing-safe
        minimum; values below ``2K+2`` are rejected, values below ``3K+1``
        would alias quadratic products and are rejected as well.
    """

    def __init__(self, max_wavenumber: int, grid_size: int | None = None):
        if max_wavenumber < 1:
            raise ValueError("max_wavenumber must be a positive integer")
        k = int(max_wavenumber)
        m = default_grid_size(k) if grid_size is None else int(grid_size)
        if m < 2 * k + 2:
            raise ValueError(
                f"grid_size {m} too small for K={k}: need at least {2 * k + 2}"
            )
        if m < 3 * k + 1:
            raise ValueError(
                f"grid_size {m} aliases quadratic products for K={k}: "
                f"need at least {3 * k + 1}"
            )
        self.max_wavenumber = k
        self.grid_size = m
        self.half_size = m // 2 + 1

        # Signed frequencies along the full axes, k3 >= 0 along the half axis.
        freqs = np.fft.fftfreq(m, d=1.0 / m).astype(np.int64)
        self.freq_full = freqs
        self.freq_half = np.arange(self.half_size, dtype=np.int64)

        k1 = freqs[:, None, None]
        k2 = freqs[None, :, None]
        k3 = self.freq_half[None, None, :]
        self.k1 = np.broadcast_to(k1, self.shape).astype(np.float64)
        self.k2 = np.broadcast_to(k2, self.shape).astype(np.float64)
        self.k3 = np.broadcast_to(k3, self.shape).astype(np.float64)
        self.ksq = self.k1**2 + self.k2**2 + self.k3**2
        self.ball_mask = self.ksq <= k * k
        # |k|^2 with the zero mode patched to 1 so multipliers can divide.
        self.ksq_safe = self.ksq.copy()
        self.ksq_safe[0, 0, 0] = 1.0

        # Hermitian multiplicity of each stored entry: planes 0 < k3 < M/2
        # represent a conjugate pair, k3 = 0 (and the never-populated
        # Nyquist plane) represent themselves.
        wgt = np.full(self.half_size, 2.0)
        wgt[0] = 1.0
        if m % 2 == 0:
            wgt[-1] = 1.0
        self.pair_weight = np.broadcast_to(wgt[None, None, :], self.shape).copy()

        self._build_mode_table()

    # ------------------------------------------------------------------
    # basic geometry
    # ------------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int, int]:
        """Shape of one component of the half-spectrum coefficient array."""
        m = self.grid_size
        return (m, m, self.half_size)

    def _build_mode_table(self) -> None:
        """Enumerate ball modes in lexicographic (k1, k2, k3) order."""
        k = self.max_wavenumber
        rng = np.arange(-k, k + 1, dtype=np.int64)
        g1, g2, g3 = np.meshgrid(rng, rng, rng, indexing="ij")
        modes = np.stack([g1.ravel(), g2.ravel(), g3.ravel()], axis=1)
        keep = (modes**2).sum(axis=1) <= k * k
        # meshgrid with 'ij' + ravel already yields lexicographic order
        self.modes = modes[keep]
        self.n_modes = len(self.modes)

        m = self.grid_size
        k1s, k2s, k3s = self.modes.T
        conj = k3s < 0
        a1 = np.where(conj, -k1s, k1s) % m
        a2 = np.where(conj, -k2s, k2s) % m
        a3 = np.where(conj, -k3s, k3s)
        self.mode_index = (a1, a2, a3)
        self.mode_conj = conj
        self.mode_ksq = (self.modes**2).sum(axis=1).astype(np.float64)

    # ------------------------------------------------------------------
    # mode-list <-> half-spectrum conversion
    # ------------------------------------------------------------------

    def extract_modes(self, spec: np.ndarray) -> np.ndarray:
        """Return per-mode coefficients (n_modes, C) in lexicographic order."""
        a1, a2, a3 = self.mode_index
        vals = spec[:, a1, a2, a3]
        vals = np.where(self.mode_conj[None, :], np.conj(vals), vals)
        return np.ascontiguousarray(vals.T)

    def pack_modes(self, coeffs: np.ndarray) -> np.ndarray:
        """Scatter per-mode coefficients back onto the half-spectrum array.

        The input must be Hermitian-consistent: entries at k and -k are
        expected to be conjugate.  Only the k3 >= 0 half is written (the
        k3 = 0 plane receives both members of each conjugate pair, which
        coincide for valid data).
        """
        coeffs = np.asarray(coeffs)
        ncomp = coeffs.shape[1]
        spec = np.zeros((ncomp,) + self.shape, dtype=np.complex128)
        sel = ~self.mode_conj
        a1, a2, a3 = self.mode_index
        spec[:, a1[sel], a2[sel], a3[sel]] = coeffs[sel].T
        return spec

    # ------------------------------------------------------------------
    # dense convolution pair table (Galerkin ODE oracle support)
    # ------------------------------------------------------------------

    @cached_property
    def pair_table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All ordered mode pairs (a, b) with a + b inside the ball.

        Returns index triplets ``(ia, ib, iout)`` into :attr:`modes` such
        that ``modes[ia] + modes[ib] = modes[iout]``.  This is the support
        of the truncated convolution; the enumeration order is fixed
        (lexicographic in (ia, ib)) so summation order is reproducible.
        """
        k = self.max_wavenumber
        n = self.n_modes
        # dense lookup cube over the sum range [-2K, 2K]^3
        side = 4 * k + 1
        lookup = np.full((side, side, side), -1, dtype=np.int64)
        off = 2 * k
        lookup[self.modes[:, 0] + off, self.modes[:, 1] + off, self.modes[:, 2] + off] = np.arange(n)

        ia, ib = np.divmod(np.arange(n * n, dtype=np.int64), n)
        sums = self.modes[ia] + self.modes[ib]
        iout = lookup[sums[:, 0] + off, sums[:, 1] + off, sums[:, 2] + off]
        keep = iout >= 0
        return ia[keep], ib[keep], iout[keep]

    # ------------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, WaveLattice)
            and other.max_wavenumber == self.max_wavenumber
            and other.grid_size == self.grid_size
        )

    def __hash__(self) -> int:
        return hash((self.max_wavenumber, self.grid_size))

    def __repr__(self) -> str:
        return f"WaveLattice(K={self.max_wavenumber}, M={self.grid_size})"

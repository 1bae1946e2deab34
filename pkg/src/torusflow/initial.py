"""Initial data constructors: classical vortices and seeded random fields."""

from __future__ import annotations

import numpy as np

from .lattice import WaveLattice
from .spectral import FourierField, l2_norm, leray_project


def _grid_coords(lattice: WaveLattice):
    m = lattice.grid_size
    x = 2.0 * np.pi * np.arange(m) / m
    return np.meshgrid(x, x, x, indexing="ij")


def taylor_green(lattice: WaveLattice, amplitude: float = 1.0) -> FourierField:
    """Taylor-Green vortex (sin x cos y cos z, -cos x sin y cos z, 0)."""
    if lattice.max_wavenumber < 2:
        raise ValueError("Taylor-Green data needs K >= 2 (modes at |k| = sqrt(3))")
    x, y, z = _grid_coords(lattice)
    vals = np.stack(
        [
            amplitude * np.sin(x) * np.cos(y) * np.cos(z),
            -amplitude * np.cos(x) * np.sin(y) * np.cos(z),
            np.zeros_like(x),
        ]
    )
    return FourierField.from_values(lattice, vals)


def abc(
    lattice: WaveLattice, a: float = 1.0, b: float = 1.0, c: float = 1.0
) -> FourierField:
    """Arnold-Beltrami-Childress flow, an eigenfield of curl at |k| = 1."""
    x, y, z = _grid_coords(lattice)
    vals = np.stack(
        [
            a * np.sin(z) + c * np.cos(y),
            b * np.sin(x) + a * np.cos(z),
            c * np.sin(y) + b * np.cos(x),
        ]
    )
    return FourierField.from_values(lattice, vals)


def _shaped_noise(
    lattice: WaveLattice,
    ncomp: int,
    k_min: int,
    k_max: int,
    slope: float,
    rng: np.random.Generator,
) -> FourierField:
    """Band-limited noise with per-mode amplitude weight |k|^slope, unit L^2."""
    if not (1 <= k_min <= k_max <= lattice.max_wavenumber):
        raise ValueError(
            f"band [{k_min}, {k_max}] not inside 1..{lattice.max_wavenumber}"
        )
    m = lattice.grid_size
    noise = rng.standard_normal((ncomp, m, m, m))
    f = FourierField.from_values(lattice, noise)
    spec = f.spec.copy()
    band = (lattice.ksq >= k_min * k_min) & (lattice.ksq <= k_max * k_max)
    weight = np.where(band, lattice.ksq_safe ** (0.5 * slope), 0.0)
    spec *= weight
    out = FourierField(lattice, spec)
    norm = l2_norm(out)
    if norm == 0.0:
        raise ValueError("empty wavenumber band")
    return out * (1.0 / norm)


def random_bandlimited(
    lattice: WaveLattice,
    k_min: int,
    k_max: int,
    slope: float = 0.0,
    divfree_amp: float = 1.0,
    gradient_amp: float = 0.0,
    seed: int = 0,
    mean=None,
) -> FourierField:
    """Seeded random vector field with controlled solenoidal/gradient parts.

    The solenoidal and gradient parts are drawn independently, normalized
    to unit L^2, and scaled by their amplitudes; `mean` (a 3-vector) sets
    the zero mode.  Per-mode amplitudes follow |k|^slope on the band
    k_min <= |k| <= k_max.
    """
    rng = np.random.default_rng(seed)
    out = FourierField.zeros(lattice)
    if divfree_amp != 0.0:
        sol = leray_project(_shaped_noise(lattice, 3, k_min, k_max, slope, rng))
        norm = l2_norm(sol)
        if norm == 0.0:
            raise ValueError("solenoidal part vanished")
        out = out + sol * (divfree_amp / norm)
    if gradient_amp != 0.0:
        raw = _shaped_noise(lattice, 3, k_min, k_max, slope, rng)
        grad_part = raw - leray_project(raw)
        norm = l2_norm(grad_part)
        if norm == 0.0:
            raise ValueError("gradient part vanished")
        out = out + grad_part * (gradient_amp / norm)
    if mean is not None:
        mean = np.asarray(mean, dtype=np.float64)
        if mean.shape != (3,):
            raise ValueError("mean must be a 3-vector")
        spec = out.spec.copy()
        spec[:, 0, 0, 0] = mean
        out = FourierField(lattice, spec)
    return out


def random_scalar(
    lattice: WaveLattice,
    k_min: int,
    k_max: int,
    slope: float = 0.0,
    amp: float = 1.0,
    seed: int = 0,
) -> FourierField:
    """Seeded mean-zero random scalar (e.g. a gauge potential), L^2 norm `amp`."""
    rng = np.random.default_rng(seed)
    return _shaped_noise(lattice, 1, k_min, k_max, slope, rng) * amp

"""Binary state snapshots.

Layout (all little-endian):

    bytes 0-3   magic "MAGW"
    u32         format version (currently 1)
    u32         max wavenumber K
    u32         grid size M
    f64         sample time
    then        n_modes * 3 coefficients as (re, im) f64 pairs,
                modes in lexicographic (k1, k2, k3) order, the three
                components of one mode stored consecutively.

The mode count is implied by K; a size mismatch is a corrupt file.
"""

from __future__ import annotations

import struct

import numpy as np

from .lattice import WaveLattice
from .spectral import FourierField

MAGIC = b"MAGW"
VERSION = 1
_HEADER = struct.Struct("<4sIIId")


def snapshot_bytes(field: FourierField, time: float) -> bytes:
    if field.ncomp != 3:
        raise ValueError("snapshots hold 3-component fields")
    lat = field.lattice
    header = _HEADER.pack(
        MAGIC, VERSION, lat.max_wavenumber, lat.grid_size, float(time)
    )
    coeffs = field.mode_coefficients().astype("<c16")
    return header + coeffs.tobytes()


def parse_snapshot(data: bytes) -> tuple[FourierField, float]:
    if len(data) < _HEADER.size:
        raise ValueError("snapshot file truncated")
    magic, version, k, m, time = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad snapshot magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    lattice = WaveLattice(k, m)
    expected = _HEADER.size + lattice.n_modes * 3 * 16
    if len(data) != expected:
        raise ValueError(
            f"snapshot payload is {len(data)} bytes, expected {expected}"
        )
    coeffs = np.frombuffer(data, dtype="<c16", offset=_HEADER.size)
    coeffs = coeffs.reshape(lattice.n_modes, 3).astype(np.complex128)
    return FourierField.from_modes(lattice, coeffs), float(time)


def write_snapshot(path, field: FourierField, time: float) -> None:
    with open(path, "wb") as fh:
        fh.write(snapshot_bytes(field, time))


def read_snapshot(path) -> tuple[FourierField, float]:
    with open(path, "rb") as fh:
        return parse_snapshot(fh.read())

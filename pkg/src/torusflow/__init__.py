"""Pseudospectral flow systems on the 3-torus with a verification harness.

The package integrates the incompressible Navier-Stokes equations, their
magnetization-variable reformulation, and several related viscous model
systems with a shared integrating-factor RK4 march, and ships the
diagnostics needed to verify the structural guarantees of each system
(projection equivalence, gauge invariance, maximum principle, momentum
laws, energy identities, existence-time bounds).
"""

from .dynamics import SYSTEM_TAGS, PrescribedVelocity
from .lattice import TORUS_VOLUME, WaveLattice, default_grid_size
from .spectral import (
    FourierField,
    galerkin_project,
    gradient,
    helmholtz_decompose,
    hs_norm,
    l2_inner,
    l2_norm,
    lambda_pow,
    leray_project,
    linf_norm,
    sobolev_seminorm,
)
from .stepping import EvolveResult, IFRK4Stepper, evolve, evolve_calderon_split

__version__ = "0.1.0"

__all__ = [
    "SYSTEM_TAGS",
    "PrescribedVelocity",
    "TORUS_VOLUME",
    "WaveLattice",
    "default_grid_size",
    "FourierField",
    "galerkin_project",
    "gradient",
    "helmholtz_decompose",
    "hs_norm",
    "l2_inner",
    "l2_norm",
    "lambda_pow",
    "leray_project",
    "linf_norm",
    "sobolev_seminorm",
    "EvolveResult",
    "IFRK4Stepper",
    "evolve",
    "evolve_calderon_split",
    "__version__",
]

"""Boundary singularities of diffusion in a half-space.

Modules
-------
geometry
    Boundary-adapted basis of an anisotropic diffusion model.
lattice
    Equivalent lattice walk with traps and fast surface jumps (Monte Carlo).
master
    Exact master-equation evolution, generating function and closed-form
    moment transforms of the lattice walk.
singular
    Near-wall kernel, singular moments and continuum surface coefficients.
fpsolver
    Finite-volume Fokker-Planck solver with the absorbing, surface-transport
    wall condition and backward-residual diagnostics.
validation, config, cli
    Acceptance checks, experiment configs and the ``fpb`` command.
"""

from .errors import FPBError
from .geometry import (BoundaryBasis, DiffusionModel, basis_report, build_boundary_basis,
                       from_boundary_coords, to_boundary_coords)
from .lattice import LatticeSpec, estimate_moments, make_lattice, simulate
from .singular import (BoundaryCoefficients, continuum_from_lattice, fit_tau_scaling, kernel_K,
                       lattice_from_continuum, singular_moments)

__version__ = "0.1.0"

__all__ = [
    "FPBError", "BoundaryBasis", "DiffusionModel", "basis_report", "build_boundary_basis",
    "from_boundary_coords", "to_boundary_coords", "LatticeSpec", "estimate_moments",
    "make_lattice", "simulate", "BoundaryCoefficients", "continuum_from_lattice",
    "fit_tau_scaling", "kernel_K", "lattice_from_continuum", "singular_moments",
]

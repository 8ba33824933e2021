"""Exception hierarchy shared by all modules.

Every error carries an ``exit_code`` used by the command-line harness:
2 for configuration problems and 3 for numerical failures.
"""

from __future__ import annotations

import warnings


class FPBError(Exception):
    """Base class for all package errors."""

    exit_code = 3


class ConfigError(FPBError):
    """Malformed or incomplete experiment configuration."""

    exit_code = 2


# geometry
class NonSymmetric(FPBError):
    """A tensor that should be symmetric is not (beyond tolerance)."""


class NotPositiveDefinite(FPBError):
    """A tensor that should be positive definite has a non-positive eigenvalue."""


class ZeroNormal(FPBError):
    """The boundary normal has zero length."""


class DegenerateNormalDirection(FPBError):
    """Diffusion along the boundary normal vanishes (or nearly so)."""


class EigenFailure(FPBError):
    """Symmetric eigen-decomposition failed or produced an inconsistent basis."""


class DimensionError(FPBError):
    """Array shapes are inconsistent or the dimension is out of range."""


# lattice
class DriftTooLarge(FPBError):
    """Drift parameter of the lattice walk is too large for the chosen step."""


class AbsorptionTooLarge(FPBError):
    """Lattice trapping parameter is not below one."""


class TruncationBreach(FPBError):
    """Probability mass or walkers reached the edge of a truncated lattice."""


class EmptyEnsemble(FPBError):
    """No walkers to estimate from."""


# generating functions
class SeriesTooShort(FPBError):
    """Truncated Laplace sum has a tail above tolerance."""


class RootNotFound(FPBError):
    """Root finder failed to converge."""


class ConvergenceStrip(FPBError):
    """Transform variable lies outside the region where the series converges."""


class OutOfAsymptoticRange(UserWarning):
    """Small-s closed forms are evaluated outside their validity window."""


# continuum analysis
class DomainError(FPBError):
    """Argument outside the mathematical domain of a function."""


class InsufficientData(FPBError):
    """Too few samples, or too narrow a range, for a scaling fit."""


# finite-volume solver
class UnstableStep(FPBError):
    """Explicit time step exceeds the stability bound."""


class NegativeDensity(FPBError):
    """Density became negative beyond tolerance."""


class InsufficientResolution(FPBError):
    """Grid too coarse for the requested residual study."""


def warn_asymptotic(message: str) -> None:
    warnings.warn(message, OutOfAsymptoticRange, stacklevel=3)

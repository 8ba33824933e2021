"""Continuum-side boundary quantities.

The near-wall kernel

    K(tau, zeta) = sqrt(tau/pi) * int_0^1 z^{-1/2} exp(-zeta^2 / (4 D_M tau z)) dz

controls how the short-time moments of a diffusing particle started at depth
``zeta`` deviate from their bulk values. Those deviations (trapped fraction,
first moment, lateral half second moment) all scale as ``sqrt(tau)`` at the
wall and are built here from the boundary geometry and two surface
coefficients: the absorption rate ``sigma`` and the surface diffusion length
``l_upsilon``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, special, stats

from .errors import DomainError, InsufficientData
from .geometry import BoundaryBasis


def _check_positive(**kw):
    for name, val in kw.items():
        if not np.all(np.asarray(val) > 0):
            raise DomainError(f"{name} must be positive, got {val}")


def _kernel_quad_scalar(tau: float, zeta: float, D_M: float, rtol: float) -> float:
    c = zeta * zeta / (4.0 * D_M * tau)
    if c == 0.0:
        return 2.0 * np.sqrt(tau / np.pi)
    # z = w**2 turns the z^{-1/2} endpoint singularity into a smooth integrand
    val, _ = integrate.quad(lambda w: np.exp(-c / (w * w)) if w > 0 else 0.0,
                            0.0, 1.0, epsabs=0.0, epsrel=rtol, limit=200)
    return 2.0 * np.sqrt(tau / np.pi) * val


def kernel_K(tau, zeta, D_M: float, method: str = "quad", rtol: float = 1e-13):
    """Near-wall kernel ``K(tau, zeta)``.

    Parameters
    ----------
    tau : float or array_like
        Elapsed time, positive.
    zeta : float or array_like
        Distance from the wall along the singular direction, non-negative.
    D_M : float
        Diffusivity along that direction.
    method : {"quad", "closed"}
        ``"quad"`` integrates the defining integral adaptively after the
        substitution ``z = w**2``. ``"closed"`` uses the equivalent form
        ``exp(-a) * (2 sqrt(tau/pi) - zeta/sqrt(D_M) * erfcx(sqrt(a)))`` with
        ``a = zeta**2 / (4 D_M tau)``.

    Raises
    ------
    DomainError
        For non-positive ``tau`` or ``D_M``, or negative ``zeta``.
    """
    _check_positive(tau=tau, D_M=D_M)
    tau_b, zeta_b = np.broadcast_arrays(np.asarray(tau, float), np.asarray(zeta, float))
    if np.any(zeta_b < 0):
        raise DomainError("zeta must be non-negative")
    if method == "closed":
        a = zeta_b**2 / (4.0 * D_M * tau_b)
        out = np.exp(-a) * (2.0 * np.sqrt(tau_b / np.pi)
                            - zeta_b / np.sqrt(D_M) * special.erfcx(np.sqrt(a)))
        out = np.maximum(out, 0.0)
    elif method == "quad":
        out = np.empty(tau_b.shape)
        for idx in np.ndindex(tau_b.shape):
            out[idx] = _kernel_quad_scalar(float(tau_b[idx]), float(zeta_b[idx]), D_M, rtol)
    else:
        raise ValueError(f"unknown method {method!r}")
    return out[()] if out.ndim == 0 else out


def kernel_K_laplace(s, zeta0, D_M: float):
    """Laplace image ``s**-1.5 * exp(-zeta0 * sqrt(s / D_M))`` of the kernel."""
    _check_positive(s=s, D_M=D_M)
    s = np.asarray(s, float)
    zeta0 = np.asarray(zeta0, float)
    if np.any(zeta0 < 0):
        raise DomainError("zeta0 must be non-negative")
    out = s**-1.5 * np.exp(-zeta0 * np.sqrt(s / D_M))
    return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class BoundaryCoefficients:
    """Continuum surface coefficients.

    Attributes
    ----------
    sigma : float
        Surface absorption rate (length/time).
    l_upsilon : float
        Surface diffusion length.
    v_surface : ndarray, shape (M-1,)
        Boundary drift, tangential components along the adapted frame.
    """

    sigma: float
    l_upsilon: float
    v_surface: np.ndarray | None = None

    def __post_init__(self):
        if self.sigma < 0 or self.l_upsilon < 0:
            raise DomainError("sigma and l_upsilon must be non-negative")
        if self.v_surface is not None:
            object.__setattr__(self, "v_surface", np.atleast_1d(np.asarray(self.v_surface, float)))


def continuum_from_lattice(sigma_a: float, g: int, tau_a: float, D_MM: float, M: int,
                           v_surface=None) -> BoundaryCoefficients:
    """Surface coefficients represented by a lattice with trap parameter
    ``sigma_a`` and ``g``-fold surface jumps.

    ``sigma = sigma_a sqrt(D_MM / (2 M tau_a))`` and
    ``l_upsilon = g sqrt(M D_MM tau_a / 2)``.
    """
    _check_positive(tau_a=tau_a, D_MM=D_MM)
    sigma = sigma_a * np.sqrt(D_MM / (2.0 * M * tau_a))
    l_ups = g * np.sqrt(M * D_MM * tau_a / 2.0)
    return BoundaryCoefficients(float(sigma), float(l_ups), v_surface)


def lattice_from_continuum(sigma: float, l_upsilon: float, tau_a: float, D_MM: float,
                           M: int) -> tuple[float, int]:
    """Inverse of :func:`continuum_from_lattice`.

    Returns ``(sigma_a, g)`` with ``g`` rounded to the nearest integer and
    clamped to at least one.
    """
    _check_positive(tau_a=tau_a, D_MM=D_MM)
    sigma_a = sigma * np.sqrt(2.0 * M * tau_a / D_MM)
    g = int(round(l_upsilon * np.sqrt(2.0 / (M * D_MM * tau_a))))
    return float(sigma_a), max(g, 1)


@dataclass(frozen=True)
class SingularMoments:
    """Singular parts of the short-time moments, in the adapted frame.

    Attributes
    ----------
    R : float
        Trapped fraction.
    U : ndarray, shape (M,)
        First moment (tangential components, then normal).
    L : ndarray, shape (M-1, M-1)
        Tangential half second moment.
    kernel : float
        Value of ``K`` used.
    """

    R: float
    U: np.ndarray
    L: np.ndarray
    kernel: float


def _surface_velocity(basis: BoundaryBasis, coeffs: BoundaryCoefficients) -> np.ndarray:
    M = basis.dim
    if coeffs.v_surface is None:
        return np.zeros(M - 1)
    v = coeffs.v_surface
    if v.shape != (M - 1,):
        raise DomainError(f"v_surface needs {M - 1} tangential components")
    return v


def singular_moments(basis: BoundaryBasis, coeffs: BoundaryCoefficients, tau: float,
                     x_normal: float = 0.0, method: str = "closed") -> SingularMoments:
    """Singular moments at depth ``x_normal`` (frame coordinate along ``n``).

    ``R = sigma K / sqrt(D_nn)``, ``U = (b + l v_s) K / sqrt(D_nn)`` and
    ``L = l S K / sqrt(D_nn)`` with ``S`` the tangential surface tensor and
    ``K`` evaluated at the depth converted to the singular direction.
    """
    if x_normal < 0:
        raise DomainError("x_normal must be non-negative")
    dnn = basis.D_normal
    zeta_m = basis.omega * x_normal / dnn
    K = float(kernel_K(tau, zeta_m, basis.D_M, method=method))
    scale = K / np.sqrt(dnn)
    b = basis.D_frame[:, -1]
    vs = np.append(_surface_velocity(basis, coeffs), 0.0)
    d = basis.D_frame[:-1, -1]
    S = basis.D_frame[:-1, :-1] - np.outer(d, d) / dnn
    return SingularMoments(
        R=coeffs.sigma * scale,
        U=(b + coeffs.l_upsilon * vs) * scale,
        L=coeffs.l_upsilon * S * scale,
        kernel=K,
    )


def singular_moments_boundary_basis(basis: BoundaryBasis, coeffs: BoundaryCoefficients,
                                    tau: float, zeta_normal: float = 0.0,
                                    method: str = "closed") -> SingularMoments:
    """Same quantities expressed in the boundary basis.

    ``U = (l u v_s, omega) K / sqrt(D_nn)`` and ``L = l diag(D_alpha) K /
    sqrt(D_nn)``, with ``zeta_normal`` the distance along ``b_M``.
    """
    if zeta_normal < 0:
        raise DomainError("zeta_normal must be non-negative")
    dnn = basis.D_normal
    K = float(kernel_K(tau, zeta_normal, basis.D_M, method=method))
    scale = K / np.sqrt(dnn)
    vb = basis.u @ _surface_velocity(basis, coeffs)
    U = np.append(coeffs.l_upsilon * vb, basis.omega) * scale
    L = coeffs.l_upsilon * np.diag(basis.eigenvalues[:-1]) * scale
    return SingularMoments(R=coeffs.sigma * scale, U=U, L=L, kernel=K)


@dataclass(frozen=True)
class ScalingFit:
    """Power-law fit ``moment ~ amplitude * tau**exponent``."""

    exponent: float
    amplitude: float
    exponent_stderr: float
    intercept_stderr: float
    n_points: int

    def confidence(self, nsigma: float = 3.0) -> tuple[float, float]:
        return (self.exponent - nsigma * self.exponent_stderr,
                self.exponent + nsigma * self.exponent_stderr)


def fit_tau_scaling(tau, values, errors=None, min_points: int = 5,
                    min_decades: float = 1.0) -> ScalingFit:
    """Least-squares fit of ``log|value|`` against ``log tau``.

    Parameters
    ----------
    tau, values : array_like
        Sample times and moment values.
    errors : array_like, optional
        Standard errors of ``values``; if given, the fit is weighted and
        the reported standard errors use them directly.

    Raises
    ------
    InsufficientData
        Fewer than ``min_points`` samples, a range narrower than
        ``min_decades`` decades, or zero/non-finite values.
    """
    tau = np.asarray(tau, float)
    values = np.asarray(values, float)
    if tau.shape != values.shape or tau.size < min_points:
        raise InsufficientData(f"need at least {min_points} samples")
    if np.any(tau <= 0) or np.log10(tau.max() / tau.min()) < min_decades - 1e-12:
        raise InsufficientData(f"tau must be positive and span {min_decades} decade(s)")
    if np.any(values == 0) or not np.all(np.isfinite(values)):
        raise InsufficientData("moments must be non-zero and finite")
    x = np.log(tau)
    y = np.log(np.abs(values))
    if errors is None:
        res = stats.linregress(x, y)
        return ScalingFit(res.slope, float(np.exp(res.intercept)), res.stderr,
                          res.intercept_stderr, tau.size)
    sig = np.asarray(errors, float) / np.abs(values)
    if np.any(sig <= 0):
        raise InsufficientData("errors must be positive")
    A = np.column_stack([x, np.ones_like(x)]) / sig[:, None]
    coef, *_ = np.linalg.lstsq(A, y / sig, rcond=None)
    cov = np.linalg.inv(A.T @ A)
    return ScalingFit(float(coef[0]), float(np.exp(coef[1])), float(np.sqrt(cov[0, 0])),
                      float(np.sqrt(cov[1, 1])), tau.size)

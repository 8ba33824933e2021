"""Boundary-adapted geometry of an anisotropic diffusion model in a half-space.

The half-space is bounded by a hyperplane with inward unit normal ``n``.
Given a constant diffusion tensor ``D`` (contravariant components), a metric
``g`` and the normal, this module builds

* the boundary singularity vector ``b = D n`` (index lowered with ``g``),
* the normalisation ``omega = |b|_g``,
* the surface diffusion tensor ``D - b b^T / (n^T g D g n)``,
* a basis made of an orthonormal eigenbasis of the surface tensor on the
  hyperplane plus the unit vector ``b / omega``. In this basis the diffusion
  tensor is diagonal.

Coordinates with respect to the new basis are written ``zeta``; the last
component ``zeta[-1]`` measures distance from the wall along ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import (
    DegenerateNormalDirection,
    DimensionError,
    EigenFailure,
    NonSymmetric,
    NotPositiveDefinite,
    ZeroNormal,
)

MAX_DIM = 16
SYMMETRY_TOL = 1e-10
DEGENERACY_TOL = 1e-10
IDENTITY_TOL = 1e-10


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DiffusionModel:
    """Constant-coefficient diffusion problem in a half-space.

    Parameters
    ----------
    D : array_like, shape (M, M)
        Diffusion tensor ``D^{ij}``.
    n : array_like, shape (M,)
        Inward normal of the boundary hyperplane.
    v : array_like, shape (M,), optional
        Bulk drift velocity. Defaults to zero.
    g : array_like, shape (M, M), optional
        Metric tensor ``g_{ij}``. Defaults to the identity.
    asymmetry : float
        Largest absolute asymmetry removed by :func:`validate_model`.
    """

    D: np.ndarray
    n: np.ndarray
    v: np.ndarray | None = None
    g: np.ndarray | None = None
    asymmetry: float = 0.0
    validated: bool = field(default=False, compare=False)

    def __post_init__(self):
        D = np.atleast_2d(np.asarray(self.D, dtype=float))
        M = D.shape[0]
        if D.shape != (M, M):
            raise DimensionError(f"D must be square, got shape {D.shape}")
        if not 1 <= M <= MAX_DIM:
            raise DimensionError(f"dimension must lie in [1, {MAX_DIM}], got {M}")
        n = np.atleast_1d(np.asarray(self.n, dtype=float))
        v = np.zeros(M) if self.v is None else np.atleast_1d(np.asarray(self.v, dtype=float))
        g = np.eye(M) if self.g is None else np.atleast_2d(np.asarray(self.g, dtype=float))
        if n.shape != (M,) or v.shape != (M,) or g.shape != (M, M):
            raise DimensionError("D, g, n and v have inconsistent dimensions")
        for name, arr in (("D", D), ("n", n), ("v", v), ("g", g)):
            if not np.all(np.isfinite(arr)):
                raise DimensionError(f"{name} contains non-finite entries")
            object.__setattr__(self, name, _frozen(arr))

    @property
    def dim(self) -> int:
        return self.D.shape[0]


def _check_spd(a: np.ndarray, name: str, tol: float) -> tuple[np.ndarray, float]:
    asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    scale = max(float(np.max(np.abs(a))), 1e-300)
    if asym > tol * scale:
        raise NonSymmetric(f"{name} is not symmetric (max asymmetry {asym:.3e})")
    sym = 0.5 * (a + a.T)
    w = np.linalg.eigvalsh(sym)
    if w[0] <= 0.0:
        raise NotPositiveDefinite(f"{name} has non-positive eigenvalue {w[0]:.6g}")
    return sym, asym


def validate_model(model: DiffusionModel, sym_tol: float = SYMMETRY_TOL) -> DiffusionModel:
    """Check and normalise a diffusion model.

    ``D`` and ``g`` are symmetrised (the removed asymmetry is recorded in
    the returned model), checked for positive definiteness, and the normal
    is rescaled to unit length under ``g``.

    Raises
    ------
    NonSymmetric, NotPositiveDefinite, ZeroNormal
    """
    D, asym_d = _check_spd(model.D, "D", sym_tol)
    g, asym_g = _check_spd(model.g, "g", sym_tol)
    norm2 = float(model.n @ g @ model.n)
    if not norm2 > 0.0:
        raise ZeroNormal("boundary normal has zero length")
    n = model.n / np.sqrt(norm2)
    return DiffusionModel(D=D, n=n, v=model.v, g=g, asymmetry=max(asym_d, asym_g), validated=True)


def _ensure_valid(model: DiffusionModel) -> DiffusionModel:
    return model if model.validated else validate_model(model)


def mixed_tensor(model: DiffusionModel) -> np.ndarray:
    """Diffusion tensor with the second index lowered, ``D^i_j = D^{ik} g_{kj}``."""
    return model.D @ model.g


def boundary_singularity_vector(model: DiffusionModel) -> np.ndarray:
    """Boundary singularity vector ``b^i = D^i_j n^j``."""
    model = _ensure_valid(model)
    return mixed_tensor(model) @ model.n


def normal_diffusivity(model: DiffusionModel) -> float:
    """Normal component ``D_{ij} n^i n^j`` (both indices lowered).

    Raises
    ------
    DegenerateNormalDirection
        If it falls below ``1e-10 * trace(D)``.
    """
    model = _ensure_valid(model)
    gn = model.g @ model.n
    dmm = float(gn @ model.D @ gn)
    if dmm <= DEGENERACY_TOL * float(np.trace(mixed_tensor(model))):
        raise DegenerateNormalDirection(f"normal diffusivity {dmm:.3e} is degenerate")
    return dmm


def normalization_omega(model: DiffusionModel) -> float:
    """Length of the boundary singularity vector under the metric.

    ``omega**2 = g_{ij} D^i_p D^j_k n^p n^k``.
    """
    model = _ensure_valid(model)
    normal_diffusivity(model)
    b = boundary_singularity_vector(model)
    return float(np.sqrt(b @ model.g @ b))


def surface_diffusion_tensor(model: DiffusionModel) -> np.ndarray:
    """Diffusion tensor with the normal-coupled part projected out.

    Returns ``D^{ij} - b^i b^j / (D_{pk} n^p n^k)``; its contraction with
    ``g n`` vanishes and its restriction to the hyperplane is positive
    definite.
    """
    model = _ensure_valid(model)
    b = boundary_singularity_vector(model)
    return model.D - np.outer(b, b) / normal_diffusivity(model)


def adapted_frame(model: DiffusionModel) -> np.ndarray:
    """Orthonormal frame whose last column is the unit normal.

    The tangential columns come from Gram-Schmidt (in the ``g`` inner
    product) applied to the coordinate axes other than the one most aligned
    with ``n``, so that an axis-aligned normal keeps the remaining axes
    unchanged.

    Returns
    -------
    Q : ndarray, shape (M, M)
        Columns ``e_1 .. e_{M-1}, n`` with ``Q^T g Q = I``.
    """
    model = _ensure_valid(model)
    M, g, n = model.dim, model.g, model.n
    skip = int(np.argmax(np.abs(n)))
    cols = [n]
    for i in range(M):
        if i == skip:
            continue
        e = np.zeros(M)
        e[i] = 1.0
        for _ in range(2):
            for c in cols:
                e = e - (c @ g @ e) * c
        e = e / np.sqrt(e @ g @ e)
        cols.append(e)
    return np.column_stack(cols[1:] + cols[:1])


@dataclass(frozen=True)
class BoundaryBasis:
    """Boundary-adapted basis of a diffusion model.

    Attributes
    ----------
    surface_basis : ndarray, shape (M-1, M)
        Orthonormal eigenvectors of the surface tensor, one per row, in
        model coordinates.
    b_M : ndarray, shape (M,)
        Unit vector along the boundary singularity vector.
    omega : float
        Length of the boundary singularity vector.
    eigenvalues : ndarray, shape (M,)
        Surface eigenvalues followed by the normal value ``omega**2 / D_nn``.
    u, u_inv : ndarray, shape (M-1, M-1)
        Map from tangential frame coordinates to surface-eigenbasis
        coordinates, and its inverse.
    frame : ndarray, shape (M, M)
        Orthonormal frame (tangential axes then ``n``) the maps refer to.
    D_frame : ndarray, shape (M, M)
        Diffusion tensor expressed in ``frame``.
    identity_residual : float
        Frobenius residual of ``u_inv diag(eig) u_inv^T`` against the
        tangential block of ``D`` with normal coupling removed.
    """

    surface_basis: np.ndarray
    b_M: np.ndarray
    omega: float
    eigenvalues: np.ndarray
    u: np.ndarray
    u_inv: np.ndarray
    frame: np.ndarray
    D_frame: np.ndarray
    identity_residual: float

    @property
    def dim(self) -> int:
        return self.frame.shape[0]

    @property
    def D_normal(self) -> float:
        """``D^{MM}`` in the adapted frame."""
        return float(self.D_frame[-1, -1])

    @property
    def D_M(self) -> float:
        """Diffusivity along ``b_M`` in the boundary basis."""
        return float(self.eigenvalues[-1])


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for j in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, j])))
        if out[k, j] < 0:
            out[:, j] = -out[:, j]
    return out


def build_boundary_basis(model: DiffusionModel, tol: float = IDENTITY_TOL) -> BoundaryBasis:
    """Construct the boundary-adapted basis of a model.

    Raises
    ------
    DegenerateNormalDirection
        Normal diffusivity vanishes.
    EigenFailure
        Eigen-decomposition failed, returned non-positive surface
        eigenvalues, or violated the reconstruction identity.
    """
    model = _ensure_valid(model)
    M = model.dim
    dnn = normal_diffusivity(model)
    omega = normalization_omega(model)
    b = boundary_singularity_vector(model)
    Q = adapted_frame(model)
    # contravariant components in the orthonormal frame: Q^{-1} = Q^T g
    Qi = Q.T @ model.g
    Df = Qi @ model.D @ Qi.T
    Sf = Qi @ surface_diffusion_tensor(model) @ Qi.T
    tangential = 0.5 * (Sf[:-1, :-1] + Sf[:-1, :-1].T)
    try:
        if M > 1:
            w, W = linalg.eigh(tangential)
        else:
            w, W = np.zeros(0), np.zeros((0, 0))
    except (linalg.LinAlgError, ValueError) as exc:
        raise EigenFailure(str(exc)) from exc
    if w.size and w[0] <= 0.0:
        raise EigenFailure(f"surface eigenvalue {w[0]:.3e} is not positive")
    W = _fix_signs(W)

    # identity check against the block computed straight from D
    d = Df[:-1, -1]
    direct = Df[:-1, :-1] - np.outer(d, d) / Df[-1, -1]
    residual = float(np.linalg.norm(W @ np.diag(w) @ W.T - direct)) if M > 1 else 0.0
    if residual > tol * max(1.0, float(np.linalg.norm(direct))):
        raise EigenFailure(f"reconstruction identity residual {residual:.3e}")
    orth = float(np.linalg.norm(W.T @ W - np.eye(M - 1))) if M > 1 else 0.0
    if orth > tol:
        raise EigenFailure(f"surface eigenbasis not orthonormal ({orth:.3e})")

    eig = np.append(w, omega**2 / dnn)
    surface = (Q[:, :-1] @ W).T
    return BoundaryBasis(
        surface_basis=_frozen(surface),
        b_M=_frozen(b / omega),
        omega=omega,
        eigenvalues=_frozen(eig),
        u=_frozen(W.T),
        u_inv=_frozen(W),
        frame=_frozen(Q),
        D_frame=_frozen(Df),
        identity_residual=residual,
    )


def _frame_coords(model: DiffusionModel, basis: BoundaryBasis, x: np.ndarray) -> np.ndarray:
    return x @ (basis.frame.T @ model.g).T


def to_boundary_coords(basis: BoundaryBasis, model: DiffusionModel, x) -> np.ndarray:
    """Map model coordinates to boundary-basis coordinates.

    Parameters
    ----------
    x : array_like, shape (..., M)
        Points (or displacements) in model coordinates.

    Returns
    -------
    zeta : ndarray, shape (..., M)
        Coordinates along the surface eigenvectors, then along ``b_M``.
    """
    return frame_to_boundary_coords(basis, to_frame(basis, model, x))


def from_boundary_coords(basis: BoundaryBasis, model: DiffusionModel, zeta) -> np.ndarray:
    """Inverse of :func:`to_boundary_coords`."""
    return from_frame(basis, boundary_coords_to_frame(basis, zeta))


def to_frame(basis: BoundaryBasis, model: DiffusionModel, x) -> np.ndarray:
    """Components of model-coordinate vectors in the adapted frame
    (tangential axes first, normal last)."""
    model = _ensure_valid(model)
    return _frame_coords(model, basis, np.asarray(x, dtype=float))


def from_frame(basis: BoundaryBasis, xf) -> np.ndarray:
    """Inverse of :func:`to_frame`."""
    return np.asarray(xf, dtype=float) @ basis.frame.T


def frame_to_boundary_coords(basis: BoundaryBasis, xf) -> np.ndarray:
    """Boundary-basis coordinates from adapted-frame coordinates."""
    xf = np.asarray(xf, dtype=float)
    dmm = basis.D_normal
    d = basis.D_frame[:-1, -1]
    xt, xm = xf[..., :-1], xf[..., -1:]
    zt = (xt - xm * d / dmm) @ basis.u.T
    zm = basis.omega * xm / dmm
    return np.concatenate([zt, zm], axis=-1)


def boundary_coords_to_frame(basis: BoundaryBasis, zeta) -> np.ndarray:
    """Adapted-frame coordinates from boundary-basis coordinates."""
    zeta = np.asarray(zeta, dtype=float)
    dmm = basis.D_normal
    d = basis.D_frame[:-1, -1]
    zt, zm = zeta[..., :-1], zeta[..., -1:]
    xt = zt @ basis.u_inv.T + zm * d / basis.omega
    xm = dmm * zm / basis.omega
    return np.concatenate([xt, xm], axis=-1)


def coordinate_jacobian(basis: BoundaryBasis, model: DiffusionModel) -> np.ndarray:
    """Matrix ``J`` with ``zeta = J x``; vectors transform with ``J``,
    contravariant tensors with ``J T J^T``."""
    return to_boundary_coords(basis, model, np.eye(basis.dim)).T


def basis_report(model: DiffusionModel) -> dict:
    """Flat summary of the boundary geometry, for printing."""
    model = validate_model(model)
    basis = build_boundary_basis(model)
    return {
        "dim": model.dim,
        "n": model.n.tolist(),
        "b": boundary_singularity_vector(model).tolist(),
        "omega": basis.omega,
        "b_M": basis.b_M.tolist(),
        "D_normal": basis.D_normal,
        "D_M": basis.D_M,
        "eigenvalues": basis.eigenvalues.tolist(),
        "surface_tensor": surface_diffusion_tensor(model).tolist(),
        "surface_basis": basis.surface_basis.tolist(),
        "identity_residual": basis.identity_residual,
        "asymmetry": model.asymmetry,
    }

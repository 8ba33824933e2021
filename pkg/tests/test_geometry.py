"""Boundary-adapted basis of anisotropic diffusion models."""

import numpy as np
import pytest

from fpboundary.errors import DegenerateNormalDirection, NonSymmetric, NotPositiveDefinite, ZeroNormal
from fpboundary.geometry import (DiffusionModel, basis_report, boundary_singularity_vector,
                                 build_boundary_basis, from_boundary_coords, normalization_omega,
                                 surface_diffusion_tensor, to_boundary_coords, validate_model)

ANISO = DiffusionModel([[2.0, 1.0], [1.0, 3.0]], [0.0, 1.0])


def test_identity_model_is_valid():
    m = validate_model(DiffusionModel(np.eye(2), [0.0, 1.0]))
    assert m.validated and m.asymmetry == 0.0


def test_indefinite_tensor_rejected():
    # eigenvalues 3 and -1
    with pytest.raises(NotPositiveDefinite):
        validate_model(DiffusionModel([[1.0, 2.0], [2.0, 1.0]], [0.0, 1.0]))


def test_anisotropic_tensor_valid():
    # eigenvalues (5 +- sqrt 5)/2, both positive
    w = np.linalg.eigvalsh(ANISO.D)
    assert np.allclose(w, [(5 - np.sqrt(5)) / 2, (5 + np.sqrt(5)) / 2])
    validate_model(ANISO)


def test_asymmetry_rejected_and_small_asymmetry_reported():
    with pytest.raises(NonSymmetric):
        validate_model(DiffusionModel([[2.0, 1.0], [0.5, 3.0]], [0.0, 1.0]))
    m = validate_model(DiffusionModel([[2.0, 1.0 + 1e-12], [1.0, 3.0]], [0.0, 1.0]))
    assert m.asymmetry == pytest.approx(1e-12, rel=1e-3)
    assert np.array_equal(m.D, m.D.T)


def test_zero_normal_rejected():
    with pytest.raises(ZeroNormal):
        validate_model(DiffusionModel(np.eye(2), [0.0, 0.0]))


def test_normal_renormalised_under_metric():
    g = np.diag([1.0, 4.0])
    m = validate_model(DiffusionModel(np.eye(2), [0.0, 1.0], g=g))
    assert m.n @ g @ m.n == pytest.approx(1.0, abs=1e-15)
    assert m.n[1] == pytest.approx(0.5)


@pytest.mark.parametrize("D,n,b", [
    (np.eye(3), [0, 0, 1], [0, 0, 1]),
    (np.diag([4.0, 9.0]), [1, 0], [4, 0]),
    ([[2.0, 1.0], [1.0, 3.0]], [0, 1], [1, 3]),
])
def test_boundary_singularity_vector(D, n, b):
    assert np.allclose(boundary_singularity_vector(DiffusionModel(D, n)), b, atol=1e-15)


@pytest.mark.parametrize("D,n,omega", [
    (np.eye(2), [0.6, 0.8], 1.0),
    ([[2.0, 1.0], [1.0, 3.0]], [0, 1], np.sqrt(10.0)),
    (np.diag([4.0, 9.0]), [1, 0], 4.0),
])
def test_normalization_omega(D, n, omega):
    assert normalization_omega(DiffusionModel(D, n)) == pytest.approx(omega, rel=1e-14)


def test_surface_tensor_examples():
    c = 2.5
    n = np.array([0.6, 0.8])
    S = surface_diffusion_tensor(DiffusionModel(c * np.eye(2), n))
    assert np.allclose(S, c * (np.eye(2) - np.outer(n, n)), atol=1e-14)
    S = surface_diffusion_tensor(ANISO)
    assert np.allclose(S, [[5 / 3, 0.0], [0.0, 0.0]], atol=1e-14)
    assert np.allclose(S @ ANISO.n, 0.0, atol=1e-12)


def test_degenerate_normal_direction():
    # D^{MM} = 0 in the normal direction is rejected (D itself must be SPD,
    # so use a metric that makes the normal diffusivity vanish numerically)
    with pytest.raises((DegenerateNormalDirection, NotPositiveDefinite)):
        build_boundary_basis(DiffusionModel([[1.0, 0.0], [0.0, 1e-14]], [0.0, 1.0]))


def test_basis_identity_case():
    b = build_boundary_basis(DiffusionModel(np.eye(2), [0.0, 1.0]))
    assert np.allclose(np.abs(b.surface_basis), [[1.0, 0.0]])
    assert np.allclose(b.b_M, [0.0, 1.0])
    assert np.allclose(b.eigenvalues, [1.0, 1.0])


def test_basis_anisotropic_case():
    b = build_boundary_basis(ANISO)
    assert np.allclose(b.b_M, np.array([1.0, 3.0]) / np.sqrt(10.0), atol=1e-14)
    assert b.eigenvalues[0] == pytest.approx(5 / 3, rel=1e-13)
    assert b.D_M == pytest.approx(10 / 3, rel=1e-13)
    assert b.D_M == pytest.approx(b.omega**2 / ANISO.D[1, 1], rel=1e-14)
    assert b.identity_residual < 1e-12


def test_coordinate_examples():
    b = build_boundary_basis(ANISO)
    assert np.allclose(to_boundary_coords(b, ANISO, [0.0, 0.0]), 0.0)
    z = to_boundary_coords(b, ANISO, [0.0, 1.0])
    # surface eigenvector sign is arbitrary; compare the invariant |z_1|
    assert abs(z[0]) == pytest.approx(1 / 3, rel=1e-13)
    assert z[1] == pytest.approx(np.sqrt(10.0) / 3, rel=1e-13)
    assert np.allclose(from_boundary_coords(b, ANISO, z), [0.0, 1.0], atol=1e-14)
    iso = DiffusionModel(np.eye(3), [0.0, 0.0, 1.0])
    bi = build_boundary_basis(iso)
    x = np.array([0.3, -1.2, 0.7])
    zi = to_boundary_coords(bi, iso, x)
    # surface eigenbasis is any rotation of the plane for a degenerate tensor
    assert np.linalg.norm(zi[:2]) == pytest.approx(np.linalg.norm(x[:2]), rel=1e-14)
    assert zi[2] == pytest.approx(x[2], rel=1e-14)


def test_random_models_identity_and_roundtrip(rng):
    for _ in range(30):
        M = int(rng.integers(2, 7))
        A = rng.normal(size=(M, M))
        D = A @ A.T + 0.1 * np.eye(M)
        n = np.zeros(M)
        n[-1] = 1.0
        m = DiffusionModel(D, n)
        b = build_boundary_basis(m)
        # brute-force identity: u_inv diag u_inv^T vs Schur complement
        Dt = D[:-1, :-1] - np.outer(D[:-1, -1], D[:-1, -1]) / D[-1, -1]
        rebuilt = b.u_inv @ np.diag(b.eigenvalues[:-1]) @ b.u_inv.T
        assert np.linalg.norm(rebuilt - Dt) < 1e-10 * max(1.0, np.linalg.norm(D))
        x = rng.normal(size=(5, M))
        assert np.max(np.abs(from_boundary_coords(b, m, to_boundary_coords(b, m, x)) - x)) < 1e-12


def test_basis_report_keys():
    rep = basis_report(ANISO)
    assert rep["D_M"] == pytest.approx(10 / 3)
    assert rep["b"] == pytest.approx([1.0, 3.0])
    assert rep["identity_residual"] < 1e-12

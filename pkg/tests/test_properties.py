"""Property tests of invariants that hold for every admissible input."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from fpboundary.config import parse_config
from fpboundary.fpsolver import BoundarySpec, Grid, solve
from fpboundary.geometry import (DiffusionModel, build_boundary_basis, from_boundary_coords,
                                 surface_diffusion_tensor, to_boundary_coords)
from fpboundary.lattice import LatticeSpec, hop_distribution
from fpboundary.master import discrete_laplace
from fpboundary.singular import continuum_from_lattice, kernel_K, lattice_from_continuum

FAST = settings(max_examples=40, deadline=None)
coef = st.floats(-1.0, 1.0, allow_nan=False)


@st.composite
def models(draw, max_dim=4):
    """SPD tensor with a unit normal, well away from degeneracy."""
    M = draw(st.integers(2, max_dim))
    A = np.array(draw(st.lists(coef, min_size=M * M, max_size=M * M))).reshape(M, M)
    D = A @ A.T + (0.2 + draw(st.floats(0.0, 2.0))) * np.eye(M)
    n = np.array(draw(st.lists(coef, min_size=M, max_size=M)))
    if np.linalg.norm(n) < 0.1:
        n = np.eye(M)[-1]
    return DiffusionModel(D, n / np.linalg.norm(n))


@FAST
@given(models())
def test_basis_reproduces_surface_block(model):
    basis = build_boundary_basis(model)
    assert basis.identity_residual < 1e-9 * np.abs(model.D).max()
    assert np.allclose(basis.surface_basis @ basis.surface_basis.T, np.eye(model.dim - 1),
                       atol=1e-10)


@FAST
@given(models(), st.lists(st.floats(-5.0, 5.0), min_size=4, max_size=4))
def test_boundary_coordinates_round_trip(model, x):
    basis = build_boundary_basis(model)
    x = np.array(x[:model.dim])
    back = from_boundary_coords(basis, model, to_boundary_coords(basis, model, x))
    assert np.allclose(back, x, atol=1e-9)


@FAST
@given(models())
def test_surface_tensor_annihilates_normal(model):
    S = surface_diffusion_tensor(model)
    assert np.allclose(S @ model.n, 0.0, atol=1e-10 * np.abs(model.D).max())
    assert np.allclose(S, S.T, atol=1e-12 * np.abs(model.D).max())
    assert np.linalg.eigvalsh(S).min() > -1e-10


@FAST
@given(st.integers(2, 3), st.floats(0.0, 0.9), st.integers(1, 30),
       st.floats(-0.9, 0.9), st.floats(-0.9, 0.9), st.sampled_from(["internal", "boundary"]))
def test_hop_tables_are_distributions(M, sigma_a, g, eps, eps_s, kind):
    spec = LatticeSpec(M, tau_a=1e-3, eps=[eps] * M, sigma_a=sigma_a, g_fold=g,
                       eps_surface=[eps_s] * (M - 1))
    table = hop_distribution(spec, kind)
    p = np.array(table.probabilities, float)
    assert np.all(p >= 0)
    assert abs(table.total() - 1.0) < 1e-14


@FAST
@given(st.floats(1e-3, 10.0), st.floats(0.0, 5.0), st.floats(0.1, 5.0), st.floats(1.01, 3.0))
def test_kernel_monotone(tau, zeta, D_M, factor):
    k = kernel_K(tau, zeta, D_M)
    assert k > 0
    assert kernel_K(tau * factor, zeta, D_M) > k
    assert kernel_K(tau, zeta + factor - 1.0, D_M) < k


@FAST
@given(st.floats(0.0, 0.99), st.integers(1, 200), st.floats(1e-6, 1e-2),
       st.floats(0.1, 5.0), st.integers(2, 3))
def test_coefficient_maps_invert(sigma_a, g, tau_a, D_MM, M):
    c = continuum_from_lattice(sigma_a, g, tau_a, D_MM, M)
    sa, g2 = lattice_from_continuum(c.sigma, c.l_upsilon, tau_a, D_MM, M)
    assert np.isclose(sa, sigma_a, rtol=1e-12, atol=1e-15)
    assert g2 == g


@FAST
@given(st.floats(0.0, 0.95), st.floats(0.05, 2.0))
def test_discrete_laplace_geometric_series(r, s):
    t = np.arange(2000)
    lv = discrete_laplace(r**t, s)
    assert np.isclose(lv.value, 1.0 / (1.0 - r * np.exp(-s)), rtol=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.5, 3.0), st.floats(0.5, 3.0), st.floats(-0.4, 0.4), st.floats(0.0, 2.0),
       st.floats(0.0, 0.3), st.floats(-1.0, 1.0))
def test_solver_conserves_mass(dxx, dzz, rho, sigma, l_ups, vs):
    dxz = rho * min(dxx, dzz)
    model = DiffusionModel([[dxx, dxz], [dxz, dzz]], [0.0, 1.0], v=[0.3, -0.5])
    S = np.array([[dxx - dxz**2 / dzz]])
    grid = Grid.from_extent([4.0, 2.0], [8, 8])
    res = solve(model, BoundarySpec(sigma, l_ups, S, np.array([vs])), [2.25, 0.375], 0.1, grid)
    f = res.fields[-1]
    assert abs(f.bulk_mass(grid) + f.absorbed_mass(grid) - 1.0) < 1e-10
    assert f.G.min() >= -1e-12
    absorbed = res.absorbed_curve()
    assert np.all(np.diff(absorbed) >= -1e-14)


@FAST
@given(st.floats(-3.0, 3.0), st.floats(0.5, 4.0),
       st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_config_values_parse_exactly(off, diag, sigma, l_ups):
    a, b, c = diag + 3.0, off, diag + 3.5
    D = np.array([[a, b], [b, c]])
    text = (f"[model]\nD = {a!r}, {b!r}; {b!r}, {c!r}\nn = 0, 1\n"
            f"[boundary]\nsigma = {sigma!r}\nl_upsilon = {l_ups!r}\n")
    cfg = parse_config(text)
    assert np.array_equal(cfg.model.D, D)
    assert cfg.sigma == sigma and cfg.l_upsilon == l_ups

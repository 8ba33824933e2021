"""Finite-volume forward solver and backward residual diagnostics."""

import numpy as np
import pytest

from fpboundary.errors import DimensionError, InsufficientResolution, UnstableStep
from fpboundary.fpsolver import (BackwardHistory, BoundarySpec, Field, Grid, backward_history,
                                 backward_residual, boundary_spec, default_dt, density_moments,
                                 flux, observed_orders, point_source, rate_operator, rates, solve,
                                 stability_bound, step)
from fpboundary.geometry import DiffusionModel
from fpboundary.singular import BoundaryCoefficients

M1 = DiffusionModel([[1.0]], [1.0])
ANISO = DiffusionModel([[2.0, 1.0], [1.0, 3.0]], [0.0, 1.0])


def test_uniform_density_has_zero_flux():
    g = Grid.from_extent([4.0, 2.0], [8, 6])
    J = flux(np.full(g.shape, 0.7), ANISO, g)
    assert all(np.max(np.abs(j)) < 1e-14 for j in J)


def test_linear_density_constant_flux():
    g = Grid.from_extent([3.0], [30])
    z = g.centers(0)
    Jz = flux(2.0 + 0.5 * z, M1, g)[-1]
    assert np.allclose(Jz[1:-1], -0.5, atol=1e-13)


def test_zero_flux_exponential_converges():
    v, D = 0.8, 1.0
    m = DiffusionModel([[D]], [1.0], v=[-v])
    errs = []
    for n in (40, 80, 160):
        g = Grid.from_extent([4.0], [n])
        z = g.centers(0)
        G = np.exp(-v * z / D)
        # the zero-flux profile of the continuum flux
        errs.append(np.max(np.abs(flux(G, m, g)[-1][1:-1])))
    assert errs[-1] < 0.02
    assert np.all(observed_orders(errs) > 0.9)


def test_reflecting_conserves_mass_per_step():
    g = Grid.from_extent([4.0, 2.0], [16, 8])
    b = BoundarySpec()
    f = Field(point_source(g, [2.1, 0.3]), np.zeros(16))
    m0 = f.bulk_mass(g)
    dt = default_dt(ANISO, g, b)
    for _ in range(50):
        f = step(f, ANISO, g, b, dt)
        assert abs(f.bulk_mass(g) - m0) < 1e-12
    assert np.all(f.absorbed == 0)


def test_absorbing_conserves_total_mass():
    g = Grid.from_extent([4.0, 2.0], [16, 8])
    b = boundary_spec(ANISO, BoundaryCoefficients(0.6, 0.2, [0.5]))
    r = solve(ANISO, b, [2.1, 0.1], 0.3, g, sample_times=[0.1, 0.2])
    assert r.mass_drift() < 1e-10
    ab = r.absorbed_curve()
    assert ab[-1] > 0 and np.all(np.diff(ab) >= 0)
    assert r.diagnostics[-1]["max_flux_residual"] < 1e-10


def test_no_absorption_without_sigma():
    g = Grid.from_extent([2.0], [20])
    r = solve(M1, BoundarySpec(0.0), [0.05], 0.2, g)
    assert np.all(r.absorbed_curve() == 0.0)


def test_unstable_step_rejected():
    g = Grid.from_extent([1.0], [20])
    b = BoundarySpec(0.5)
    bound = stability_bound(M1, g, b)
    f = Field(point_source(g, [0.5]), np.zeros(1))
    with pytest.raises(UnstableStep):
        step(f, M1, g, b, 1.01 * bound)
    assert default_dt(M1, g, b) <= 0.5 * bound


def test_model_orientation_checked():
    with pytest.raises(DimensionError):
        flux(np.ones(4), DiffusionModel([[1.0, 0], [0, 1.0]], [1.0, 0.0]), Grid.from_extent([1.0, 1.0], [2, 2]))


def test_rate_operator_matches_rates(rng):
    g = Grid.from_extent([2.0, 1.0], [6, 5])
    b = boundary_spec(ANISO, BoundaryCoefficients(0.4, 0.3, [-0.7]))
    A, B = rate_operator(ANISO, g, b, chunk=7)
    G = rng.random(g.shape)
    dG, ab = rates(G, ANISO, g, b)
    assert np.allclose(A @ G.ravel(), dG.ravel(), atol=1e-12)
    assert np.allclose(B @ G.ravel(), ab.ravel(), atol=1e-12)


def test_point_source_normalised_and_centered():
    g = Grid.from_extent([8.0, 4.0], [16, 8])
    G = point_source(g, [4.25, 2.25])
    mom = density_moments(Field(G, np.zeros(16)), g)
    assert mom["mass"] == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(mom["mean"], [4.25, 2.25], atol=1e-14)
    G1 = point_source(g, [4.25, 0.0], spread=False)
    assert G1.sum() * g.cell_volume == pytest.approx(1.0)
    assert np.count_nonzero(G1) == 1


def test_reflecting_stationary_exponential():
    v, D = 1.0, 1.0
    m = DiffusionModel([[D]], [1.0], v=[-v])
    errs = []
    # first-order upwind drift: refine twice to get below 1%
    for n in (100, 200):
        g = Grid.from_extent([5.0], [n])
        r = solve(m, BoundarySpec(), [2.5], 12.0, g)
        z = g.centers(0)
        ref = np.exp(-v * z / D)
        ref /= ref.sum() * g.spacing[0]
        G = r.fields[-1].G
        errs.append(np.sqrt(np.sum((G - ref) ** 2)) / np.sqrt(np.sum(ref**2)))
    assert errs[-1] < 0.01
    assert errs[-1] < errs[0]


def test_free_space_gaussian_1d():
    D = 0.7
    m = DiffusionModel([[D]], [1.0], v=[0.3])
    g = Grid.from_extent([20.0], [800])
    T = 1.0
    r = solve(m, BoundarySpec(), [10.0125], T, g)
    mom = density_moments(r.fields[-1], g, origin=[10.0125])
    h = g.spacing[0]
    var = mom["second"][0, 0] - mom["mean"][0] ** 2 - 0.5 * h * h
    assert mom["mean"][0] == pytest.approx(0.3 * T, rel=0.01)
    assert var == pytest.approx(2 * D * T, rel=0.01)


def test_sample_times_hit_exactly():
    g = Grid.from_extent([2.0], [20])
    r = solve(M1, BoundarySpec(0.3), [0.5], 0.5, g, sample_times=[0.123, 0.3])
    assert np.allclose(r.times, [0.0, 0.123, 0.3, 0.5])
    assert [f.t for f in r.fields] == list(r.times)


def _analytic_history(grid, D, v, k, t):
    # u(z0, t) for f(z) = exp(-k z) in free space: exp(-k z0 + (D k^2 - v k) t)
    z0 = grid.centers(-1)
    u = np.exp(-k * z0 + (D * k * k - v * k) * t)
    return BackwardHistory(grid, u, (D * k * k - v * k) * u, t)


def test_residual_of_exact_solution_vanishes():
    D, v = 1.3, 0.4
    m = DiffusionModel([[D]], [1.0], v=[v])
    norms = []
    for n in (20, 40, 80):
        g = Grid.from_extent([2.0], [n])
        res = backward_residual(_analytic_history(g, D, v, 1.1, 0.2), m, BoundarySpec())
        norms.append(res["bulk_max"])
    assert norms[-1] < 1e-6
    assert np.all(observed_orders(norms) >= 1.0)


def test_impermeable_wall_residual_decays():
    norms = []
    for n in (32, 64):
        g = Grid.from_extent([2.0], [n])
        h = backward_history(M1, BoundarySpec(), g, 0.1, observable=lambda z: np.exp(-z))
        norms.append(backward_residual(h, M1, BoundarySpec())["wall_max"])
    assert norms[1] < norms[0]


def test_robin_wall_residual_first_order():
    b = BoundarySpec(0.7)
    norms = []
    for n in (32, 64, 128):
        g = Grid.from_extent([2.0], [n])
        h = backward_history(M1, b, g, 0.1, observable=lambda z: np.exp(-z))
        res = backward_residual(h, M1, b)
        norms.append((res["wall_max"], res["bulk_max"]))
    w, bk = np.array(norms).T
    assert np.all(observed_orders(w) >= 0.9)
    assert np.all(observed_orders(bk) >= 1.0)


def test_residual_needs_depth():
    g = Grid.from_extent([1.0], [8])
    with pytest.raises(InsufficientResolution):
        backward_residual(BackwardHistory(g, np.ones(4), np.zeros(4), 0.1), M1, BoundarySpec())


@pytest.mark.slow
def test_lateral_second_moment_matches_monte_carlo():
    from fpboundary.geometry import build_boundary_basis
    from fpboundary.lattice import estimate_moments, make_lattice, simulate

    model = DiffusionModel([[2.0, 0.0], [0.0, 3.0]], [0.0, 1.0])
    tau_a, T = 2e-4, 0.2
    spec = make_lattice(build_boundary_basis(model), None, None, 0.0, 0.3, tau_a)
    e = estimate_moments(simulate(spec, 0, int(round(T / tau_a)), 40000, seed=1), spec)
    # a g-fold jump adds g-1 lateral hops over a bulk visit, so the
    # continuum length the lattice realises carries g-1
    l_eff = (spec.g_fold - 1) * np.sqrt(2 * 3.0 * tau_a / 2)
    g = Grid.from_extent([16.0, 5.0], [16, 400])
    b = boundary_spec(model, BoundaryCoefficients(0.0, l_eff))
    r = solve(model, b, [8.5, 0.0], T, g)
    mom = density_moments(r.fields[-1], g, origin=[8.5, 0.0])
    # the three-cell source adds hx^2/2 to the lateral variance
    L_pde = 0.5 * (mom["second"][0, 0] - 0.5 * g.spacing[0] ** 2)
    assert L_pde > 2.0 * T * 1.2          # well above the bulk rate
    assert abs(L_pde - e.L_phys[0, 0]) < 3 * e.L_phys_err[0, 0]


def test_sample_times_accept_arrays():
    g = Grid.from_extent([4.0], [40])
    res = solve(M1, BoundarySpec(0.5), [0.05], 0.2, g, sample_times=np.array([0.1, 0.2]))
    assert np.allclose(res.times, [0.0, 0.1, 0.2])

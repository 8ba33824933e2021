"""Exact evolution, transforms and generating-function machinery."""

import warnings
from fractions import Fraction

import numpy as np
import pytest

from fpboundary.errors import ConvergenceStrip, OutOfAsymptoticRange, SeriesTooShort
from fpboundary.lattice import LatticeSpec, estimate_moments, simulate
from fpboundary.master import (boundary_generation_function, closed_form_transforms,
                               discrete_laplace, discrete_moments, evolve, evolve_layers,
                               functional_equation_residual, generation_function,
                               laplace_moments, phi_boundary, phi_internal, solve_varpi,
                               transforms_from_generating_function)


def _enumerate(sigma_a, n0, T):
    """Occupation and traps of the M=2, g=1, zero-drift walk by path enumeration."""
    s = Fraction(sigma_a)
    nodes = {(0, n0): Fraction(1)}
    traps = {}
    for _ in range(T):
        new = {}
        for (x, n), p in nodes.items():
            if n == 0:
                moves = [((x, 1), (1 - s) / 2), ((x + 1, 0), Fraction(1, 4)), ((x - 1, 0), Fraction(1, 4))]
                traps[x] = traps.get(x, 0) + p * s / 2
            else:
                moves = [((x + 1, n), Fraction(1, 4)), ((x - 1, n), Fraction(1, 4)),
                         ((x, n + 1), Fraction(1, 4)), ((x, n - 1), Fraction(1, 4))]
            for key, q in moves:
                new[key] = new.get(key, 0) + p * q
        nodes = new
    return nodes, traps


def test_initial_delta():
    spec = LatticeSpec(dim=2, sigma_a=0.2)
    h = evolve(spec, 3, 0, n_z=10, n_xy=5)
    assert h.P[3, 5] == 1.0 and h.P.sum() == 1.0


def test_two_step_grid_matches_enumeration():
    spec = LatticeSpec(dim=2, sigma_a=0.2)
    h = evolve(spec, 0, 2, n_z=12, n_xy=6, edge_tol=1.0)
    nodes, traps = _enumerate(Fraction(1, 5), 0, 2)
    ref = np.zeros_like(h.P)
    for (x, n), p in nodes.items():
        ref[n, x + 6] = float(p)
    assert np.allclose(h.P, ref, atol=1e-15)
    tref = np.zeros_like(h.traps)
    for x, p in traps.items():
        tref[x + 6] = float(p)
    assert np.allclose(h.traps, tref, atol=1e-15)


def test_no_traps_without_absorption():
    h = evolve(LatticeSpec(dim=2, g_fold=3), 0, 40)
    assert np.all(h.traps == 0.0)
    m = discrete_moments(h)
    assert np.all(m.R == pytest.approx(0.0, abs=1e-13))


def test_conservation_and_monotone_traps():
    spec = LatticeSpec(dim=2, sigma_a=0.3, g_fold=2, eps=[0.05, -0.1], eps_surface=[0.2])
    m = discrete_moments(evolve(spec, 1, 80))
    assert np.max(np.abs(m.node_mass + m.trap_mass - 1.0)) < 1e-12
    assert np.all(np.diff(m.trap_mass) >= -1e-16)
    assert np.allclose(m.R, m.trap_mass, atol=1e-12)


def test_moments_at_zero_and_one_step():
    spec = LatticeSpec(dim=2)
    m = discrete_moments(evolve(spec, 20, 1, n_z=40, n_xy=5))
    assert m.R[0] == 0 and np.all(m.U[0] == 0) and np.all(m.L[0] == 0)
    # four moves of 1/4, each displaces one axis by one node
    assert m.L[1, 0, 0] == pytest.approx(0.25, abs=1e-15)
    assert m.L[1, 1, 1] == pytest.approx(0.25, abs=1e-15)


def test_layer_evolution_equals_full_grid():
    spec = LatticeSpec(dim=2, sigma_a=0.15, g_fold=3, eps=[0.04, 0.02], eps_surface=[-0.1])
    full = discrete_moments(evolve(spec, 2, 60))
    red = evolve_layers(spec, 2, 60)
    for key in ("R", "U", "L"):
        assert np.allclose(getattr(full, key), getattr(red, key), atol=1e-11)


def test_three_dimensional_evolution():
    spec = LatticeSpec(dim=3, sigma_a=0.1, g_fold=2, eps_surface=[0.1, 0.0])
    full = discrete_moments(evolve(spec, 0, 25))
    red = evolve_layers(spec, 0, 25)
    assert np.allclose(full.L, red.L, atol=1e-11)
    assert np.allclose(full.R, red.R, atol=1e-13)


def test_mc_matches_exact_evolution():
    spec = LatticeSpec(dim=2, sigma_a=0.2, g_fold=3)
    T = 60
    ex = evolve_layers(spec, 0, T)
    e = estimate_moments(simulate(spec, 0, T, 40000, seed=21), spec)
    assert abs(e.R - ex.R[-1]) < 3 * e.R_err
    assert np.all(np.abs(e.U - ex.U[-1]) < 3 * e.U_err)
    assert np.all(np.abs(e.L - ex.L[-1]) < 3 * e.L_err + 1e-12)


def test_discrete_laplace_examples():
    s = 0.3
    c = np.full(400, 2.5)
    assert discrete_laplace(c, s).value == pytest.approx(2.5 / (1 - np.exp(-s)), rel=1e-12)
    d = np.zeros(400)
    d[0] = 1.0
    assert discrete_laplace(d, s).value == 1.0
    with pytest.raises(SeriesTooShort):
        discrete_laplace(np.ones(10), 0.01)


def test_characteristic_function_values():
    spec = LatticeSpec(dim=2, sigma_a=0.2, g_fold=4)
    assert phi_internal(spec, 0.0, [0.0]) == pytest.approx(1.0)
    assert phi_boundary(spec, 0.0, [0.0]) == pytest.approx(1 - 0.2 / 2)


def test_phi_taylor_coefficients():
    spec = LatticeSpec(dim=2, eps=[0.1, -0.2])
    h = 1e-2
    f = lambda p: phi_internal(spec, p, [0.0]).real
    # fourth-order central differences
    d1 = (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)
    d2 = (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h)
    # expected: -eps_M/M and 1/(2M) times 2
    assert d1 == pytest.approx(0.2 / 2, abs=1e-8)
    assert d2 == pytest.approx(1 / 2, abs=1e-8)
    fk = lambda k: phi_internal(spec, 0.0, [k])
    dk = (-fk(2 * h) + 8 * fk(h) - 8 * fk(-h) + fk(-2 * h)) / (12 * h)
    dkk = (-fk(2 * h) + 16 * fk(h) - 30 * fk(0.0) + 16 * fk(-h) - fk(-2 * h)) / (12 * h * h)
    assert dk.imag == pytest.approx(0.1 / 2, abs=1e-8)
    assert dkk.real == pytest.approx(-1 / 2, abs=1e-8)


def test_varpi():
    spec = LatticeSpec(dim=2)
    assert solve_varpi(spec, 1e-12) < 1e-5
    assert solve_varpi(spec, 1e-4) == pytest.approx(0.02, rel=1e-2)
    w = solve_varpi(spec, 0.5)
    assert abs(phi_internal(spec, w) - np.exp(0.5)) < 1e-12
    wc = solve_varpi(LatticeSpec(dim=2, eps=[0.1, 0.05]), 0.2 + 0.1j, [0.3])
    assert wc.real > 0


def test_functional_equation(rng):
    spec = LatticeSpec(dim=2, sigma_a=0.1, g_fold=3, eps=[0.02, 0.03], eps_surface=[0.1])
    for _ in range(20):
        s = complex(rng.uniform(0.01, 1.0), rng.uniform(-0.5, 0.5))
        p = complex(rng.uniform(0.0, 0.5), rng.uniform(-1, 1))
        k = [rng.uniform(-1, 1)]
        assert functional_equation_residual(spec, s, p, k, n0=int(rng.integers(0, 4))) < 1e-10


def test_generating_function_normalisation():
    spec = LatticeSpec(dim=2, sigma_a=0.2, g_fold=2)
    s = 0.05
    G = generation_function(spec, s, 0.0, [0.0], n0=1)
    R = transforms_from_generating_function(spec, s, n0=1)["R"]
    assert (G + R).real == pytest.approx(1 / (1 - np.exp(-s)), rel=1e-12)
    with pytest.raises(ConvergenceStrip):
        generation_function(spec, s, -5.0, [0.0])
    with pytest.raises(ConvergenceStrip):
        generation_function(spec, -0.1, 0.0, [0.0])


def test_generating_function_vs_evolution():
    spec = LatticeSpec(dim=2, sigma_a=0.2, g_fold=2, eps=[0.05, 0.0])
    s = 0.05
    series = evolve_layers(spec, 1, 900)
    ex = laplace_moments(series, s)
    gf = transforms_from_generating_function(spec, s, n0=1)
    assert gf["R"] == pytest.approx(ex["R"], rel=1e-3)
    assert np.allclose(gf["U"], ex["U"], rtol=1e-3)
    assert np.allclose(np.diag(gf["L"]), np.diag(ex["L"]), rtol=1e-3)
    gb = boundary_generation_function(spec, s, [0.0], n0=1)
    # boundary-layer transform is the transform of the layer-0 occupation
    assert gb.real == pytest.approx(discrete_laplace(_wall_series(spec, 1, 900), s).value, rel=1e-3)


def _wall_series(spec, n0, T):
    out = np.zeros(T + 1)
    h = evolve(spec, n0, T, keep=range(T + 1))
    for t in range(T + 1):
        out[t] = h.snapshots[t][0][0].sum()
    return out


def test_closed_form_examples():
    spec = LatticeSpec(dim=2, g_fold=3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutOfAsymptoticRange)
        cf = closed_form_transforms(spec, 0.01)
    assert cf["R"] == 0.0
    assert cf["L"][-1, -1] == pytest.approx(1 / (2 * 2 * 0.01**2))
    with pytest.warns(OutOfAsymptoticRange):
        closed_form_transforms(spec, 0.5)


def test_closed_form_normal_mean_vs_evolution():
    spec = LatticeSpec(dim=2, sigma_a=0.05, g_fold=3)
    s = 0.01
    ex = laplace_moments(evolve_layers(spec, 0, 4000), s)
    cf = closed_form_transforms(spec, s)
    assert cf["U"][-1] == pytest.approx(ex["U"][-1], rel=0.05)

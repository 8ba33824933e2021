"""Short-time displacement near an absorbing, fast-transport wall.

A walker started on the wall of an anisotropic medium drifts away from it
with a mean that grows like sqrt(tau), whereas bulk drift grows linearly.
This script builds the boundary basis, simulates the equivalent lattice and
compares the Monte Carlo trapped fraction and first moment with the
kernel-based amplitudes.

Run: python3 demos/wall_scaling.py
"""

import numpy as np

from fpboundary import (BoundaryCoefficients, DiffusionModel, build_boundary_basis,
                        continuum_from_lattice, estimate_moments, fit_tau_scaling,
                        lattice_from_continuum, make_lattice, simulate, singular_moments)

model = DiffusionModel([[2.0, 1.0], [1.0, 3.0]], [0.0, 1.0])
basis = build_boundary_basis(model)
print("surface basis:", basis.surface_basis.round(4).tolist())
print("singular direction:", basis.b_M.round(4).tolist(), " omega =", round(basis.omega, 4))

coeffs = BoundaryCoefficients(sigma=0.3, l_upsilon=0.05, v_surface=[2.0])
tau_a = 1e-6
spec = make_lattice(basis, None, coeffs.v_surface, coeffs.sigma, coeffs.l_upsilon, tau_a)
sigma_a, g = lattice_from_continuum(coeffs.sigma, coeffs.l_upsilon, tau_a, basis.D_normal, 2)
print(f"lattice: sigma_a = {sigma_a:.4g}, g = {g}")

steps = np.array([100, 200, 400, 700, 1000])
ens = simulate(spec, 0, int(steps[-1]), 50000, seed=11, record_times=steps)
realised = continuum_from_lattice(sigma_a, g, tau_a, basis.D_normal, 2, coeffs.v_surface)
normal = []
print(f"{'tau':>9s} {'R mc':>10s} {'R pred':>10s} {'U_n mc':>10s} {'U_n pred':>10s}")
for t in steps:
    e = estimate_moments(ens, spec, int(t))
    pred = singular_moments(basis, BoundaryCoefficients(coeffs.sigma, realised.l_upsilon,
                                                        coeffs.v_surface), e.tau)
    normal.append(e.U_phys[-1])
    print(f"{e.tau:9.2e} {e.R:10.4g} {pred.R:10.4g} {e.U_phys[-1]:10.4g} {pred.U[-1]:10.4g}")

fit = fit_tau_scaling(steps * tau_a, normal)
print(f"fitted exponent of the normal first moment: {fit.exponent:.3f} (expected 0.5)")

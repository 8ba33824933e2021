"""Absorbing wall: finite-volume solver against the lattice walk.

The solver's absorbed mass for a source on a Robin wall is compared with the
trapped fraction of walkers on the lattice that represents the same
absorption rate. Both approach the same curve as the grid and lattice are
refined; at this hop duration the walk's trapped fraction still carries a
small positive lattice bias of order sqrt(tau_a).

Run: python3 demos/solver_vs_walk.py
"""

import numpy as np

from fpboundary import (DiffusionModel, build_boundary_basis, estimate_moments, make_lattice,
                        simulate)
from fpboundary.fpsolver import BoundarySpec, Grid, solve

D_nn, sigma, tau_a = 3.0, 0.5, 2e-4
model = DiffusionModel([[D_nn]], [1.0])
grid = Grid.from_extent([10.0], [800])
times = np.linspace(0.2, 1.0, 5)
res = solve(model, BoundarySpec(sigma), [0.0], times[-1], grid, sample_times=times)

walk_model = DiffusionModel([[2.0, 0.0], [0.0, D_nn]], [0.0, 1.0])
spec = make_lattice(build_boundary_basis(walk_model), None, None, sigma, 0.0, tau_a)
steps = np.rint(times / tau_a).astype(int)
ens = simulate(spec, 0, int(steps[-1]), 20000, seed=3, record_times=steps)

print(f"{'tau':>5s} {'solver':>8s} {'walk':>8s} {'stderr':>8s}")
for t, k in zip(times, steps):
    absorbed = res.fields[int(np.argmin(np.abs(res.times - t)))].absorbed_mass(grid)
    p = estimate_moments(ens, spec, int(k)).R
    err = np.sqrt(p * (1 - p) / ens.n_walkers)
    print(f"{t:5.2f} {absorbed:8.4f} {p:8.4f} {err:8.4f}")

"""Explicit finite-volume forward Fokker-Planck solver on a half-space.

The density ``G`` lives on cell averages of a rectangular grid whose last axis
is the wall normal; the wall is the face ``z = 0`` and the opposite face is
reflecting. In two dimensions the lateral axis is periodic.

Bulk flux: ``J = -D grad G + v G`` (central differences for diffusion, upwind
for drift). Mixed derivatives use the seven-point stencil oriented along the
diagonal matching the sign of the off-diagonal diffusivity, which keeps the
scheme monotone for ``|D_xz| <= min(D_xx, D_zz)`` on square cells; the wall
and far faces carry no mixed gradient, so the diffusion operator stays
symmetric and its adjoint discretises the backward problem consistently. On the wall
the normal flux into the medium is prescribed as

    n.J = -sigma G + div_s( l D_s grad_s G - l v_s G ),

with ``D_s`` the surface diffusion tensor and ``div_s``/``grad_s`` acting along
the wall. The first term feeds the absorbed surface density; the second only
moves mass along the wall and telescopes to zero over a periodic wall, so the
scheme conserves bulk plus absorbed mass to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import DimensionError, InsufficientResolution, NegativeDensity, UnstableStep
from .geometry import DiffusionModel, surface_diffusion_tensor, validate_model
from .singular import BoundaryCoefficients

NEG_TOL = 1e-6


@dataclass(frozen=True)
class Grid:
    """Uniform cell grid; the last axis is normal to the wall.

    Parameters
    ----------
    shape : tuple of int
        ``(n_z,)`` in 1D or ``(n_x, n_z)`` in 2D.
    spacing : tuple of float
        Cell sizes in the same order.
    """

    shape: tuple
    spacing: tuple

    def __post_init__(self):
        shape = tuple(int(n) for n in np.atleast_1d(self.shape))
        spacing = tuple(float(h) for h in np.atleast_1d(self.spacing))
        if len(shape) not in (1, 2) or len(spacing) != len(shape):
            raise DimensionError("grid must be 1D or 2D with one spacing per axis")
        if min(spacing) <= 0 or min(shape) < 3:
            raise DimensionError("need positive spacings and at least 3 cells per axis")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "spacing", spacing)

    @classmethod
    def from_extent(cls, extent, cells) -> "Grid":
        extent = np.atleast_1d(extent).astype(float)
        cells = np.atleast_1d(cells).astype(int)
        return cls(tuple(cells), tuple(extent / cells))

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def extent(self) -> tuple:
        return tuple(n * h for n, h in zip(self.shape, self.spacing))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def wall_area(self) -> float:
        """Area of one wall face (1 in 1D)."""
        return float(np.prod(self.spacing[:-1])) if self.dim > 1 else 1.0

    def centers(self, axis: int) -> np.ndarray:
        h = self.spacing[axis]
        return (np.arange(self.shape[axis]) + 0.5) * h

    def mesh(self) -> list:
        return np.meshgrid(*[self.centers(a) for a in range(self.dim)], indexing="ij")


@dataclass(frozen=True)
class BoundarySpec:
    """Wall coefficients: absorption rate, surface diffusion length, the
    tangential surface diffusion tensor and the boundary drift."""

    sigma: float = 0.0
    l_upsilon: float = 0.0
    surface_tensor: np.ndarray | None = None
    v_surface: np.ndarray | None = None

    def __post_init__(self):
        if self.sigma < 0 or self.l_upsilon < 0:
            raise DimensionError("sigma and l_upsilon must be non-negative")


def boundary_spec(model: DiffusionModel, coeffs: BoundaryCoefficients) -> BoundarySpec:
    """Wall coefficients of a model whose normal is the last axis."""
    model = _check_model(model)
    S = surface_diffusion_tensor(model)[:-1, :-1]
    vs = coeffs.v_surface if coeffs.v_surface is not None else np.zeros(model.dim - 1)
    return BoundarySpec(coeffs.sigma, coeffs.l_upsilon, S, np.asarray(vs, float))


@dataclass
class Field:
    """Cell-averaged density, absorbed surface density per wall face, time."""

    G: np.ndarray
    absorbed: np.ndarray
    t: float = 0.0

    def bulk_mass(self, grid: Grid) -> float:
        return float(self.G.sum() * grid.cell_volume)

    def absorbed_mass(self, grid: Grid) -> float:
        return float(np.sum(self.absorbed) * grid.wall_area)

    def copy(self) -> "Field":
        return Field(self.G.copy(), np.array(self.absorbed, copy=True), self.t)


def monotone_cells(model: DiffusionModel, grid: Grid) -> bool:
    """True if the mixed-derivative stencil is monotone on this grid,
    ``|D_xz| hz <= D_xx hx`` and ``|D_xz| hx <= D_zz hz``."""
    if grid.dim == 1:
        return True
    D = model.D
    hx, hz = grid.spacing
    c = abs(D[0, -1])
    return c * hz <= D[0, 0] * hx * (1 + 1e-12) and c * hx <= D[-1, -1] * hz * (1 + 1e-12)


def _negative(msg: str, model: DiffusionModel, grid: Grid) -> NegativeDensity:
    if not monotone_cells(model, grid):
        msg += "; the cell aspect ratio breaks monotonicity of the mixed stencil"
    return NegativeDensity(msg)


def _check_model(model: DiffusionModel) -> DiffusionModel:
    model = validate_model(model)
    e = np.zeros(model.dim)
    e[-1] = 1.0
    if not np.allclose(model.n, e, atol=1e-12):
        raise DimensionError("solver expects the wall normal along the last axis")
    if not np.allclose(model.g, np.eye(model.dim), atol=1e-12):
        raise DimensionError("solver expects an orthonormal metric")
    return model


def _upwind(v: float, left, right):
    return v * (left if v > 0 else right)


def _wall_value(G):
    # wall-adjacent cell value: positivity preserving, and its adjoint is a
    # consistent discretisation of the backward wall condition
    return G[..., 0]


def flux(field: Field | np.ndarray, model: DiffusionModel, grid: Grid,
         bspec: BoundarySpec | None = None):
    """Face fluxes of the density.

    Returns
    -------
    list of ndarray
        One array per axis. The normal array has ``n_z + 1`` faces along
        the last axis: face 0 is the wall (flux into the medium from the
        boundary condition, zero if ``bspec`` is None), face ``n_z`` is the
        reflecting far side. Lateral arrays hold the flux through the face
        between cell ``i`` and ``i + 1`` (periodic).
    Leading batch axes of ``G`` are carried through.
    """
    G = field.G if isinstance(field, Field) else np.asarray(field, float)
    model = _check_model(model)
    D, v = model.D, model.v
    d = grid.dim
    hz = grid.spacing[-1]
    nz = grid.shape[-1]
    batch = G.shape[: G.ndim - d]
    Jz = np.zeros(batch + grid.shape[:-1] + (nz + 1,))
    Jz[..., 1:nz] = -D[-1, -1] * (G[..., 1:] - G[..., :-1]) / hz + _upwind(v[-1], G[..., :-1], G[..., 1:])
    out = []
    if d == 2:
        hx = grid.spacing[0]
        Gp = np.roll(G, -1, axis=-2)
        dxf = (Gp - G) / hx                              # lateral faces i+1/2
        dzf = np.zeros(batch + grid.shape[:-1] + (nz + 1,))
        dzf[..., 1:nz] = (G[..., 1:] - G[..., :-1]) / hz  # normal faces, none at wall/far side
        below, above = dzf[..., :-1], dzf[..., 1:]
        c = 0.5 * D[0, -1]
        # mixed terms along the diagonal matching the sign of D_xz
        if D[0, -1] >= 0:
            mix_x = np.roll(above, -1, axis=-2) + below
            mix_z = dxf[..., 1:] + np.roll(dxf, 1, axis=-2)[..., :-1]
        else:
            mix_x = above + np.roll(below, -1, axis=-2)
            mix_z = np.roll(dxf, 1, axis=-2)[..., 1:] + dxf[..., :-1]
        Jz[..., 1:nz] += -c * mix_z
        Jx = -D[0, 0] * dxf - c * mix_x + _upwind(v[0], G, Gp)
        out.append(Jx)
    if bspec is not None:
        Jz[..., 0] = wall_flux(G, grid, bspec)
    out.append(Jz)
    return out


def surface_flux(Gw, grid: Grid, bspec: BoundarySpec):
    """Flux along the wall, ``-l D_s grad_s Gw + l v_s Gw``, at faces i+1/2."""
    hx = grid.spacing[0]
    Ds = float(np.atleast_2d(bspec.surface_tensor)[0, 0]) if bspec.surface_tensor is not None else 0.0
    vs = float(np.atleast_1d(bspec.v_surface)[0]) if bspec.v_surface is not None else 0.0
    Gp = np.roll(Gw, -1, axis=-1)
    return bspec.l_upsilon * (-Ds * (Gp - Gw) / hx + _upwind(vs, Gw, Gp))


def wall_flux(G, grid: Grid, bspec: BoundarySpec):
    """Normal flux into the medium through each wall face."""
    Gw = _wall_value(G)
    out = -bspec.sigma * Gw
    if grid.dim == 2 and bspec.l_upsilon > 0:
        S = surface_flux(Gw, grid, bspec)
        out = out - (S - np.roll(S, 1, axis=-1)) / grid.spacing[0]
    return out


def rates(G, model: DiffusionModel, grid: Grid, bspec: BoundarySpec):
    """Time derivative of the density and absorption rate per wall face."""
    J = flux(G, model, grid, bspec)
    dG = -(J[-1][..., 1:] - J[-1][..., :-1]) / grid.spacing[-1]
    if grid.dim == 2:
        Jx = J[0]
        dG = dG - (Jx - np.roll(Jx, 1, axis=-2)) / grid.spacing[0]
    absorb = bspec.sigma * _wall_value(np.asarray(G))
    return dG, absorb


def stability_bound(model: DiffusionModel, grid: Grid, bspec: BoundarySpec) -> float:
    """Largest explicit step keeping the diagonal of ``I + dt A`` non-negative."""
    model = _check_model(model)
    D, v = model.D, model.v
    rate = 0.0
    for a, h in enumerate(grid.spacing):
        rate += 2 * D[a, a] / h**2 + abs(v[a]) / h
    hz = grid.spacing[-1]
    wall_rate = D[-1, -1] / hz**2 + abs(v[-1]) / hz + bspec.sigma / hz
    if grid.dim == 2:
        hx = grid.spacing[0]
        wall_rate += 2 * D[0, 0] / hx**2 + abs(v[0]) / hx
        if bspec.l_upsilon > 0 and bspec.surface_tensor is not None:
            Ds = float(np.atleast_2d(bspec.surface_tensor)[0, 0])
            vs = float(np.atleast_1d(bspec.v_surface)[0]) if bspec.v_surface is not None else 0.0
            wall_rate += bspec.l_upsilon * (2 * Ds / hx**2 + abs(vs) / hx) / hz
    return 1.0 / max(rate, wall_rate)


def default_dt(model: DiffusionModel, grid: Grid, bspec: BoundarySpec) -> float:
    """``0.4 min(h^2 / (2 max D), h / max|v|)``, capped at half the
    positivity bound (which also covers absorption and surface transport)."""
    model = _check_model(model)
    h = min(grid.spacing)
    dmax = float(np.max(np.linalg.eigvalsh(model.D)))
    vmax = float(np.max(np.abs(model.v)))
    dt = h * h / (2 * dmax)
    if vmax > 0:
        dt = min(dt, h / vmax)
    return min(0.4 * dt, 0.5 * stability_bound(model, grid, bspec))


def step(field: Field, model: DiffusionModel, grid: Grid, bspec: BoundarySpec, dt: float,
         neg_tol: float = NEG_TOL) -> Field:
    """One explicit conservative update.

    Raises
    ------
    UnstableStep
        If ``dt`` exceeds :func:`stability_bound`.
    NegativeDensity
        If the update produces densities below ``-neg_tol * max(G)``.
    """
    bound = stability_bound(model, grid, bspec)
    if dt > bound * (1 + 1e-12):
        raise UnstableStep(f"dt = {dt:.3e} exceeds stability bound {bound:.3e}")
    dG, absorb = rates(field.G, model, grid, bspec)
    G = field.G + dt * dG
    if G.min() < -neg_tol * max(G.max(), 1e-300):
        raise _negative(f"density {G.min():.3e} below tolerance", model, grid)
    return Field(G, field.absorbed + dt * absorb, field.t + dt)


def rate_operator(model: DiffusionModel, grid: Grid, bspec: BoundarySpec,
                  chunk: int = 256):
    """Sparse matrices ``A`` and ``B`` with ``dG/dt = A G`` and absorption
    rate ``B G`` (both on flattened cell arrays)."""
    model = _check_model(model)
    N = int(np.prod(grid.shape))
    nw = N // grid.shape[-1]
    A_cols, B_cols = [], []
    for start in range(0, N, chunk):
        k = min(chunk, N - start)
        E = np.zeros((k, N))
        E[np.arange(k), start + np.arange(k)] = 1.0
        dG, ab = rates(E.reshape((k,) + grid.shape), model, grid, bspec)
        A_cols.append(sparse.csr_matrix(dG.reshape(k, N)))
        B_cols.append(sparse.csr_matrix(np.asarray(ab).reshape(k, nw)))
    A = sparse.vstack(A_cols).T.tocsr()
    B = sparse.vstack(B_cols).T.tocsr()
    A.eliminate_zeros()
    B.eliminate_zeros()
    return A, B


def point_source(grid: Grid, r0, spread: bool = True) -> np.ndarray:
    """Unit mass placed in the cell containing ``r0`` and, if ``spread``,
    smoothed with weights (1/4, 1/2, 1/4) per axis; the wall and far side
    fold the spill back, the lateral axis wraps. Returned as a density."""
    r0 = np.atleast_1d(np.asarray(r0, float))
    if r0.shape != (grid.dim,):
        raise DimensionError("source location has wrong dimension")
    weights = []
    for a in range(grid.dim):
        n, h = grid.shape[a], grid.spacing[a]
        c = int(np.clip(np.floor(r0[a] / h), 0, n - 1))
        w = np.zeros(n)
        taps = ((-1, 0.25), (0, 0.5), (1, 0.25)) if spread else ((0, 1.0),)
        for off, wt in taps:
            j = c + off
            if a == grid.dim - 1:
                j = min(max(j, 0), n - 1)
            else:
                j %= n
            w[j] += wt
        weights.append(w)
    G = weights[0]
    for w in weights[1:]:
        G = np.multiply.outer(G, w)
    return G / grid.cell_volume


@dataclass
class SolveResult:
    """Snapshots and diagnostics of a run.

    Attributes
    ----------
    times : ndarray
        Sample times (including 0).
    fields : list of Field
        Snapshots at ``times``.
    diagnostics : list of dict
        Per sample: time, bulk mass, absorbed mass, mass drift and the
        largest mismatch between wall outflow and absorption seen so far.
    dt : float
    n_steps : int
    """

    times: np.ndarray
    fields: list
    diagnostics: list
    dt: float
    n_steps: int
    grid: Grid = None
    operator: tuple = field(default=None, repr=False)

    def absorbed_curve(self) -> np.ndarray:
        return np.array([d["absorbed_mass"] for d in self.diagnostics])

    def mass_drift(self) -> float:
        return max(abs(d["mass_drift"]) for d in self.diagnostics)


def solve(model: DiffusionModel, bspec: BoundarySpec, initial, T: float, grid: Grid,
          sample_times=None, dt: float | None = None,
          neg_tol: float = NEG_TOL, spread: bool = True, operator=None) -> SolveResult:
    """Evolve a point source (or a given density) up to time ``T``.

    Parameters
    ----------
    initial : array_like
        Source location (length ``dim``) or a full initial density array.
    sample_times : iterable of float, optional
        Times at which snapshots are kept; steps are shortened to land on
        them exactly. ``T`` is always sampled.
    spread : bool
        Smooth a point source over three cells per axis (see
        :func:`point_source`).
    operator : tuple, optional
        Prebuilt ``(A, B)`` from :func:`rate_operator` for the same inputs.

    Raises
    ------
    UnstableStep, NegativeDensity
    """
    model = _check_model(model)
    init = np.asarray(initial, float)
    G0 = init.copy() if init.shape == grid.shape else point_source(grid, init, spread)
    bound = stability_bound(model, grid, bspec)
    dt = default_dt(model, grid, bspec) if dt is None else float(dt)
    if dt > bound * (1 + 1e-12):
        raise UnstableStep(f"dt = {dt:.3e} exceeds stability bound {bound:.3e}")
    times = sorted(set([float(t) for t in (() if sample_times is None else sample_times)]
                       + [float(T)]))
    if times[0] < 0:
        raise ValueError("sample times must be non-negative")
    A, B = rate_operator(model, grid, bspec) if operator is None else operator
    g = G0.ravel().copy()
    absorbed = np.zeros(B.shape[0])
    vol, area = grid.cell_volume, grid.wall_area
    m0 = g.sum() * vol
    out_times, fields, diags = [0.0], [], []
    max_res = 0.0

    def snapshot(t):
        f = Field(g.reshape(grid.shape).copy(), absorbed.reshape(grid.shape[:-1]).copy()
                  if grid.dim > 1 else absorbed.copy(), t)
        fields.append(f)
        bulk = g.sum() * vol
        ab = absorbed.sum() * area
        diags.append({"time": t, "bulk_mass": bulk, "absorbed_mass": ab,
                      "mass_drift": bulk + ab - m0, "max_flux_residual": max_res})

    snapshot(0.0)
    t = 0.0
    n_steps = 0
    for target in times:
        if target <= 0.0:
            continue
        while t < target * (1 - 1e-14):
            h = min(dt, target - t)
            dg = A @ g
            ab = B @ g
            # wall outflow must equal absorption once surface terms telescope
            res = abs(dg.sum() * vol + ab.sum() * area)
            max_res = max(max_res, res)
            g = g + h * dg
            absorbed = absorbed + h * ab
            t = target if target - t <= dt else t + h
            n_steps += 1
            if g.min() < -neg_tol * max(g.max(), 1e-300):
                raise _negative(f"density {g.min():.3e} at t = {t:.4g}", model, grid)
        out_times.append(target)
        snapshot(target)
    return SolveResult(np.array(out_times), fields, diags, dt, n_steps, grid, (A, B))


def density_moments(f: Field, grid: Grid, origin=None) -> dict:
    """Mass, mean and covariance-like raw moments of a bulk density about ``origin``."""
    X = grid.mesh()
    vol = grid.cell_volume
    origin = np.zeros(grid.dim) if origin is None else np.asarray(origin, float)
    mass = f.G.sum() * vol
    mean = np.array([(f.G * (x - o)).sum() * vol for x, o in zip(X, origin)])
    second = np.array([[(f.G * (xi - oi) * (xj - oj)).sum() * vol
                        for xj, oj in zip(X, origin)] for xi, oi in zip(X, origin)])
    return {"mass": mass, "mean": mean, "second": second}


# ---------------------------------------------------------------------------
# backward boundary condition residuals
# ---------------------------------------------------------------------------

@dataclass
class BackwardHistory:
    """Observable ``u(r0, t) = int f(r) G(r, t | r0) dr`` on a grid of
    starting points, with its exact discrete time derivative.

    Attributes
    ----------
    grid : Grid
        Solver grid; starting points are its cell centres with normal
        index below ``depth``.
    u, ut : ndarray
        Shape ``grid.shape[:-1] + (depth,)``.
    t : float
    """

    grid: Grid
    u: np.ndarray
    ut: np.ndarray
    t: float


def backward_history(model: DiffusionModel, bspec: BoundarySpec, grid: Grid, T: float,
                     observable=None, depth: int | None = None) -> BackwardHistory:
    """Run the forward solver once per starting depth and evaluate ``u``.

    The lateral axis is periodic and the coefficients are constant, so the
    values for all lateral starting points follow from one run per depth by
    shifting the observable. Sources occupy a single cell: the folded
    three-cell spread would bias the normal derivative at the wall.
    """
    model = _check_model(model)
    depth = grid.shape[-1] // 2 if depth is None else int(depth)
    X = grid.mesh()
    f = np.ones(grid.shape) if observable is None else np.asarray(observable(*X), float)
    vol = grid.cell_volume
    lat = grid.shape[:-1]
    u = np.zeros(lat + (depth,))
    ut = np.zeros(lat + (depth,))
    hz = grid.spacing[-1]
    op = rate_operator(model, grid, bspec)
    A = op[0]
    for j in range(depth):
        r0 = np.zeros(grid.dim)
        r0[-1] = (j + 0.5) * hz
        if grid.dim == 2:
            r0[0] = 0.5 * grid.spacing[0]
        res = solve(model, bspec, r0, T, grid, spread=False, operator=op)
        Gt = res.fields[-1].G
        rate = (A @ Gt.ravel()).reshape(grid.shape)
        if grid.dim == 1:
            u[j] = (f * Gt).sum() * vol
            ut[j] = (f * rate).sum() * vol
        else:
            for i in range(grid.shape[0]):
                fs = np.roll(f, -i, axis=0)
                u[i, j] = (fs * Gt).sum() * vol
                ut[i, j] = (fs * rate).sum() * vol
    return BackwardHistory(grid, u, ut, T)


def backward_residual(history: BackwardHistory, model: DiffusionModel, bspec: BoundarySpec,
                      bulk_margin: int = 3) -> dict:
    """Finite-difference residuals of the backward equation and its wall condition.

    Bulk: ``u_t - (D : grad grad u + v . grad u)`` at starting depths from
    ``bulk_margin`` cells off the wall to two cells short of the deepest one. Wall: ``b . grad u - sigma u + l (D_s : grad_s grad_s u +
    v_s . grad_s u)`` with values and normal derivatives extrapolated to the
    wall from the first three starting depths.

    Returns
    -------
    dict
        ``bulk_max``, ``bulk_l2``, ``wall_max``, ``wall_l2`` and the scale
        used to make them relative (``max |u_t|``).

    Raises
    ------
    InsufficientResolution
        Fewer than ``bulk_margin + 3`` starting depths.
    """
    model = _check_model(model)
    grid = history.grid
    D, v = model.D, model.v
    u, ut = history.u, history.ut
    hz = grid.spacing[-1]
    depth = u.shape[-1]
    bulk_margin = max(int(bulk_margin), 2)
    if depth < bulk_margin + 3:
        raise InsufficientResolution("too few starting depths for the residual stencils")
    scale = float(np.max(np.abs(ut))) or 1.0

    # fourth-order central differences, independent of the solver stencils
    def d1(a, axis, h):
        if axis == -1:
            return (-a[..., 4:] + 8 * a[..., 3:-1] - 8 * a[..., 1:-3] + a[..., :-4]) / (12 * h)
        r = lambda k: np.roll(a, -k, axis=0)
        return (-r(2) + 8 * r(1) - 8 * r(-1) + r(-2)) / (12 * h)

    def d2(a, axis, h):
        if axis == -1:
            return (-a[..., 4:] + 16 * a[..., 3:-1] - 30 * a[..., 2:-2] + 16 * a[..., 1:-3]
                    - a[..., :-4]) / (12 * h * h)
        r = lambda k: np.roll(a, -k, axis=0)
        return (-r(2) + 16 * r(1) - 30 * a + 16 * r(-1) - r(-2)) / (12 * h * h)

    core = slice(2, -2)
    bulk = ut[..., core] - D[-1, -1] * d2(u, -1, hz) - v[-1] * d1(u, -1, hz)
    if grid.dim == 2:
        hx = grid.spacing[0]
        ux = d1(u, 0, hx)
        bulk = (bulk - D[0, 0] * d2(u, 0, hx)[..., core] - 2 * D[0, -1] * d1(ux, -1, hz)
                - v[0] * ux[..., core])
    bulk = bulk[..., bulk_margin - 2:]

    u0 = (15 * u[..., 0] - 10 * u[..., 1] + 3 * u[..., 2]) / 8
    uz0 = (-2 * u[..., 0] + 3 * u[..., 1] - u[..., 2]) / hz
    b = D[:, -1]
    wall = b[-1] * uz0 - bspec.sigma * u0
    if grid.dim == 2:
        hx = grid.spacing[0]
        wx = d1(u0, 0, hx)
        wxx = d2(u0, 0, hx)
        Ds = float(np.atleast_2d(bspec.surface_tensor)[0, 0]) if bspec.surface_tensor is not None else 0.0
        vs = float(np.atleast_1d(bspec.v_surface)[0]) if bspec.v_surface is not None else 0.0
        wall = wall + b[0] * wx + bspec.l_upsilon * (Ds * wxx + vs * wx)
    return {
        "bulk_max": float(np.max(np.abs(bulk))) / scale,
        "bulk_l2": float(np.sqrt(np.mean(bulk**2))) / scale,
        "wall_max": float(np.max(np.abs(wall))) / scale,
        "wall_l2": float(np.sqrt(np.mean(wall**2))) / scale,
        "scale": scale,
    }


def observed_orders(norms, ratio: float = 2.0) -> np.ndarray:
    """Observed convergence orders from residual norms on grids refined by ``ratio``."""
    norms = np.asarray(norms, float)
    return np.log(norms[:-1] / norms[1:]) / np.log(ratio)

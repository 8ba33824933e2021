"""Exact evolution of the lattice walk and its generating functions.

Two exact evolvers are provided:

* :func:`evolve` propagates the full probability grid (layers times a
  lateral box, ``M`` in {2, 3}) and the trap layer, step by step.
* :func:`evolve_layers` propagates, per layer, the probability and the first
  two lateral moments of the walkers found there. Lateral increments never
  depend on the lateral position, so this closes exactly and gives all
  moments for long runs at the cost of a one-dimensional grid.

The generating function ``G(s, p, k) = sum_t e^{-st} sum_nodes P_t(n, m)
exp(-p (n - n0) + i k.m)`` has a closed form built from the one-step
characteristic functions ``Phi`` (internal node) and ``phi`` (boundary node,
trap excluded) and the positive root ``varpi`` of ``Phi(varpi, k) = e^s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, signal, sparse, special

from .errors import (
    ConvergenceStrip,
    DimensionError,
    RootNotFound,
    SeriesTooShort,
    TruncationBreach,
    warn_asymptotic,
)
from .lattice import LatticeSpec, hop_distribution, surface_jump_moments

EDGE_TOL = 1e-10
ROOT_TOL = 1e-12


# ---------------------------------------------------------------------------
# truncation
# ---------------------------------------------------------------------------

def default_depth(spec: LatticeSpec, n0: int, T: int) -> int:
    """Layers kept: ``n0 + 8 sqrt(T/M) + 10`` plus the drift excursion.

    The normal displacement has variance close to ``T/M``; eight standard
    deviations keep the edge mass far below the monitor threshold.
    """
    M = spec.dim
    drift = max(spec.eps[-1], 0.0) * T / M
    return int(n0 + math.ceil(8.0 * math.sqrt(T / M) + drift) + 10)


def default_width(spec: LatticeSpec, T: int) -> int:
    """Lateral half-width covering bulk hops and repeated surface jumps."""
    M, g = spec.dim, spec.g_fold
    mean, second = surface_jump_moments(spec)
    visits = 2.0 * math.sqrt(T) + 1.0
    var = T / M + visits * float(np.max(np.diag(second)))
    drift = float(np.max(np.abs(spec.eps[:-1]), initial=0.0)) * T / M + visits * float(np.max(np.abs(mean)))
    return int(math.ceil(drift + 6.0 * math.sqrt(var)) + g + 10)


# ---------------------------------------------------------------------------
# moment series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentSeries:
    """Moments per step in lattice units.

    Attributes
    ----------
    t : ndarray of int, shape (T+1,)
    R : ndarray, shape (T+1,)
        Trapped mass ``1 - sum over nodes``.
    U : ndarray, shape (T+1, M)
        ``sum_nodes (position - start) P`` (lateral then normal).
    L : ndarray, shape (T+1, M, M)
        Half second moments, nodes only.
    node_mass, trap_mass : ndarray, shape (T+1,)
        Probability on lattice nodes and in traps.
    """

    t: np.ndarray
    R: np.ndarray
    U: np.ndarray
    L: np.ndarray
    node_mass: np.ndarray
    trap_mass: np.ndarray

    def at(self, t: int) -> dict:
        return {"R": float(self.R[t]), "U": self.U[t], "L": self.L[t]}


@dataclass
class ProbabilityHistory:
    """Output of :func:`evolve`.

    Attributes
    ----------
    P : ndarray
        Final grid, shape ``(n_z + 1, 2 n_xy + 1[, 2 n_xy + 1])``; axis 0 is
        the layer, the remaining axes lateral indices offset by ``n_xy``.
    traps : ndarray
        Final trapped mass per boundary site.
    sums : dict
        Per-step raw sums used by :func:`discrete_moments`.
    snapshots : dict
        ``{t: (P, traps)}`` copies at requested steps.
    n0, n_z, n_xy, T : int
    max_edge_mass : float
        Largest mass seen on the truncation edge (including leaked mass).
    """

    P: np.ndarray
    traps: np.ndarray
    sums: dict
    snapshots: dict
    n0: int
    n_z: int
    n_xy: int
    T: int
    max_edge_mass: float


def _single_hop_kernel(spec: LatticeSpec) -> np.ndarray:
    M = spec.dim
    probs = hop_distribution(spec, "surface_hop").probabilities
    k = np.zeros((3,) * (M - 1))
    centre = (1,) * (M - 1)
    for a in range(M - 1):
        for j, sign in enumerate((1, -1)):
            idx = list(centre)
            idx[a] += sign
            k[tuple(idx)] = probs[2 * a + j]
    return k


def surface_jump_kernel(spec: LatticeSpec) -> np.ndarray:
    """Exact distribution of a ``g``-fold surface jump on a centred grid
    of half-width ``g`` (convolution power of the single in-layer hop)."""
    k1 = _single_hop_kernel(spec)
    out = k1
    for _ in range(spec.g_fold - 1):
        out = signal.convolve(out, k1, mode="full", method="direct")
    return out


def _shift_add(dst, src, axis, shift, weight):
    """dst += weight * src shifted by ``shift`` along ``axis`` (zero fill)."""
    if shift == 0:
        dst += weight * src
        return
    n = src.shape[axis]
    s_src = [slice(None)] * src.ndim
    s_dst = [slice(None)] * src.ndim
    if shift > 0:
        s_src[axis] = slice(0, n - shift)
        s_dst[axis] = slice(shift, n)
    else:
        s_src[axis] = slice(-shift, n)
        s_dst[axis] = slice(0, n + shift)
    dst[tuple(s_dst)] += weight * src[tuple(s_src)]


def evolve(spec: LatticeSpec, n0: int, T: int, n_z: int | None = None, n_xy: int | None = None,
           keep=(), edge_tol: float = EDGE_TOL) -> ProbabilityHistory:
    """Step the master equations of the walk on a truncated grid.

    Parameters
    ----------
    spec : LatticeSpec
        ``spec.dim`` must be 2 or 3.
    n0 : int
        Starting layer (lateral origin).
    T : int
        Number of steps.
    n_z, n_xy : int, optional
        Truncation depth and lateral half-width; defaults from
        :func:`default_depth` and :func:`default_width`.
    keep : iterable of int
        Steps at which to store full grid copies.

    Raises
    ------
    TruncationBreach
        If mass on (or leaked through) the grid edge exceeds ``edge_tol``.
    """
    M = spec.dim
    if M not in (2, 3):
        raise DimensionError("full-grid evolution supports M = 2 or 3")
    if n0 < 0 or T < 0:
        raise ValueError("n0 and T must be non-negative")
    n_z = n_z if n_z is not None else (spec.n_z or default_depth(spec, n0, T))
    n_xy = n_xy if n_xy is not None else (spec.n_xy or default_width(spec, T))
    if n0 >= n_z:
        raise TruncationBreach("starting layer outside the grid")
    lat = 2 * n_xy + 1
    shape = (n_z + 1,) + (lat,) * (M - 1)
    P = np.zeros(shape)
    P[(n0,) + (n_xy,) * (M - 1)] = 1.0
    traps = np.zeros(shape[1:])
    kernel = surface_jump_kernel(spec)

    layer = np.arange(n_z + 1, dtype=float) - n0
    coords = [np.arange(lat, dtype=float) - n_xy for _ in range(M - 1)]
    keep = set(int(t) for t in keep)
    snapshots = {}
    sums = {k: np.zeros(T + 1) for k in ("mass", "trap")}
    sums["first"] = np.zeros((T + 1, M))
    sums["second"] = np.zeros((T + 1, M, M))

    def record(t, P):
        sums["mass"][t] = P.sum()
        sums["trap"][t] = traps.sum()
        # marginals give first and second moments cheaply
        pn = P.reshape(n_z + 1, -1).sum(axis=1)
        sums["first"][t, -1] = layer @ pn
        sums["second"][t, -1, -1] = (layer**2) @ pn
        for a in range(M - 1):
            shp = [1] * M
            shp[a + 1] = lat
            xa = coords[a].reshape(shp)
            sums["first"][t, a] = (xa * P).sum()
            sums["second"][t, a, -1] = sums["second"][t, -1, a] = (xa * layer.reshape((-1,) + (1,) * (M - 1)) * P).sum()
            for b in range(a, M - 1):
                shb = [1] * M
                shb[b + 1] = lat
                xb = coords[b].reshape(shb)
                sums["second"][t, a, b] = sums["second"][t, b, a] = (xa * xb * P).sum()
        if t in keep:
            snapshots[t] = (P.copy(), traps.copy())

    def edge_mass(P):
        e = P[-1].sum()
        for ax in range(1, M):
            lo = [slice(None)] * M
            hi = [slice(None)] * M
            lo[ax] = slice(0, spec.g_fold + 1)
            hi[ax] = slice(lat - spec.g_fold - 1, lat)
            e += P[tuple(lo)].sum() + P[tuple(hi)].sum()
        return e

    pu = (1.0 + spec.eps[-1]) / (2 * M)
    pd = (1.0 - spec.eps[-1]) / (2 * M)
    lateral = [((1.0 + spec.eps[a]) / (2 * M), (1.0 - spec.eps[a]) / (2 * M)) for a in range(M - 1)]
    record(0, P)
    max_edge = edge_mass(P)
    for t in range(1, T + 1):
        new = np.zeros_like(P)
        inner = P[1:]
        new[2:] += pu * inner[:-1]
        new[:-1] += pd * inner
        for a, (pp, pm) in enumerate(lateral):
            _shift_add(new[1:], inner, a + 1, 1, pp)
            _shift_add(new[1:], inner, a + 1, -1, pm)
        wall = P[0]
        new[1] += spec.p_up * wall
        traps = traps + spec.p_trap * wall
        new[0] += spec.p_surface * signal.convolve(wall, kernel, mode="same", method="direct")
        P = new
        leaked = 1.0 - P.sum() - traps.sum()
        max_edge = max(max_edge, edge_mass(P) + abs(leaked))
        record(t, P)
    if max_edge > edge_tol:
        raise TruncationBreach(f"edge mass {max_edge:.3e} exceeds {edge_tol:.1e}; enlarge the grid")
    return ProbabilityHistory(P, traps, sums, snapshots, n0, n_z, n_xy, T, max_edge)


def discrete_moments(history: ProbabilityHistory, n0: int | None = None) -> MomentSeries:
    """Trapped mass, first and half second moments per step.

    ``U`` and ``L`` are sums over lattice nodes only; trapped mass does not
    contribute.
    """
    if n0 is not None and n0 != history.n0:
        raise ValueError("n0 does not match the evolved history")
    s = history.sums
    T = history.T
    return MomentSeries(
        t=np.arange(T + 1),
        R=1.0 - s["mass"],
        U=s["first"].copy(),
        L=0.5 * s["second"],
        node_mass=s["mass"].copy(),
        trap_mass=s["trap"].copy(),
    )


# ---------------------------------------------------------------------------
# reduced exact evolution (layer marginals plus lateral moments)
# ---------------------------------------------------------------------------

def _layer_operator(spec: LatticeSpec, N: int) -> tuple[sparse.csr_matrix, int]:
    """Sparse one-step map of the state [P, A_1..A_{M-1}, B_11..] per layer."""
    M = spec.dim
    L = M - 1
    nb = L * L
    size = (1 + L + nb) * (N + 1)
    pu = (1.0 + spec.eps[-1]) / (2 * M)
    pd = (1.0 - spec.eps[-1]) / (2 * M)
    ps = (M - 1) / M
    c1 = spec.eps[:-1] / M
    c2 = np.eye(L) / M
    mean_b, second_b = surface_jump_moments(spec)
    c1b = spec.p_surface * mean_b
    c2b = spec.p_surface * second_b

    def P_(n):
        return n

    def A_(n, a):
        return (1 + a) * (N + 1) + n

    def B_(n, a, b):
        return (1 + L + a * L + b) * (N + 1) + n

    rows, cols, vals = [], [], []

    def add(r, c, v):
        if v != 0.0:
            rows.append(r)
            cols.append(c)
            vals.append(v)

    for n in range(N + 1):
        # transport of each quantity with zero lateral displacement
        if n == 0:
            moves = [(1, spec.p_up), (0, spec.p_surface)]
            d1, d2 = c1b, c2b
        else:
            moves = [(n - 1, pd), (n, ps)]
            if n + 1 <= N:
                moves.append((n + 1, pu))
            d1, d2 = c1, c2
        for dest, w in moves:
            add(P_(dest), P_(n), w)
            for a in range(L):
                add(A_(dest, a), A_(n, a), w)
                for b in range(L):
                    add(B_(dest, a, b), B_(n, a, b), w)
        # lateral increments accrue on the destination = same layer
        for a in range(L):
            add(A_(n, a), P_(n), d1[a])
            for b in range(L):
                add(B_(n, a, b), P_(n), d2[a, b])
                add(B_(n, a, b), A_(n, a), d1[b])
                add(B_(n, a, b), A_(n, b), d1[a])
    op = sparse.csr_matrix((vals, (rows, cols)), shape=(size, size))
    op.sum_duplicates()
    return op, size


def evolve_layers(spec: LatticeSpec, n0: int, T: int, n_z: int | None = None,
                  edge_tol: float = EDGE_TOL) -> MomentSeries:
    """Exact moment series from layer marginals and lateral moments.

    Equivalent to :func:`discrete_moments` of :func:`evolve` for any ``M``,
    but the cost grows only with the depth of the grid.

    Raises
    ------
    TruncationBreach
        If mass in the deepest layer (or leaked) exceeds ``edge_tol``.
    """
    M = spec.dim
    L = M - 1
    N = n_z if n_z is not None else (spec.n_z or default_depth(spec, n0, T))
    if n0 >= N:
        raise TruncationBreach("starting layer outside the grid")
    op, size = _layer_operator(spec, N)
    x = np.zeros(size)
    x[n0] = 1.0
    layer = np.arange(N + 1, dtype=float) - n0
    n_obs = 1 + M + M * M
    obs = np.zeros((n_obs, size))
    blk = N + 1
    obs[0, :blk] = 1.0
    for a in range(L):
        obs[1 + a, (1 + a) * blk:(2 + a) * blk] = 1.0
    obs[M, :blk] = layer
    base = 1 + M

    def o(i, j):
        return base + i * M + j

    for a in range(L):
        for b in range(L):
            obs[o(a, b), (1 + L + a * L + b) * blk:(2 + L + a * L + b) * blk] = 1.0
        obs[o(a, L), (1 + a) * blk:(2 + a) * blk] = layer
        obs[o(L, a), (1 + a) * blk:(2 + a) * blk] = layer
    obs[o(L, L), :blk] = layer**2
    obs = sparse.csr_matrix(obs)

    out = np.empty((T + 1, n_obs))
    trap = np.zeros(T + 1)
    out[0] = obs @ x
    max_edge = 0.0
    p_trap = spec.p_trap
    for t in range(1, T + 1):
        trap[t] = trap[t - 1] + p_trap * x[0]
        x = op @ x
        out[t] = obs @ x
    max_edge = max(float(x[N]), abs(1.0 - out[-1, 0] - trap[-1]))
    if max_edge > edge_tol:
        raise TruncationBreach(f"edge mass {max_edge:.3e} exceeds {edge_tol:.1e}; enlarge the grid")
    mass = out[:, 0]
    U = out[:, 1:1 + M]
    Lm = 0.5 * out[:, base:].reshape(T + 1, M, M)
    return MomentSeries(np.arange(T + 1), 1.0 - mass, U, Lm, mass, trap)


# ---------------------------------------------------------------------------
# discrete Laplace transform
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaplaceValue:
    """Truncated transform and an estimate of the neglected tail."""

    value: np.ndarray | float
    tail: np.ndarray | float


def discrete_laplace(series, s: float, tol: float = 1e-6, check: bool = True) -> LaplaceValue:
    """``sum_t exp(-s t) x_t`` over the available steps ``t = 0..T``.

    The tail beyond ``T`` is bounded by extending each component as a power
    law ``|x_T| (t/T)^q``, with ``q`` measured from the last half of the
    series and clipped to [0, 2] (moments of a diffusive walk grow at most
    quadratically).

    Raises
    ------
    SeriesTooShort
        If ``check`` and the tail exceeds ``tol`` relative to the value.
    """
    if not s > 0:
        raise ValueError("s must be positive")
    x = np.asarray(series, dtype=float)
    T = x.shape[0] - 1
    w = np.exp(-s * np.arange(T + 1))
    value = np.tensordot(w, x, axes=(0, 0))
    if T < 2:
        tail = np.abs(x[-1]) * np.exp(-s * T) / (1 - np.exp(-s)) if T >= 0 else np.inf
    else:
        xT = np.abs(x[-1])
        xh = np.abs(x[T // 2])
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(xh > 0, np.log(np.maximum(xT, 1e-300) / xh) / np.log(T / (T // 2)), 0.0)
        q = np.clip(q, 0.0, 2.0)
        # sum_{t>T} (t/T)^q e^{-st} <= e^{-s} * int_T^inf (t/T)^q e^{-s(t-1)} dt style bound
        gam = special.gamma(q + 1) * special.gammaincc(q + 1, s * T)
        tail = xT * (T ** -q) * s ** (-q - 1) * gam * np.exp(s)
    if check:
        scale = np.maximum(np.abs(value), 1e-300)
        if np.any(tail > tol * scale + 1e-300):
            raise SeriesTooShort(f"tail {np.max(tail):.3e} above tolerance; evolve longer")
    return LaplaceValue(value[()] if np.ndim(value) == 0 else value,
                        tail[()] if np.ndim(tail) == 0 else tail)


def laplace_moments(series: MomentSeries, s: float, tol: float = 1e-6) -> dict:
    """Discrete Laplace transforms of ``R``, ``U`` and ``L``."""
    return {
        "R": discrete_laplace(series.R, s, tol).value,
        "U": discrete_laplace(series.U, s, tol).value,
        "L": discrete_laplace(series.L, s, tol).value,
    }


# ---------------------------------------------------------------------------
# characteristic functions and the generating function
# ---------------------------------------------------------------------------

def _k_vec(spec: LatticeSpec, k) -> np.ndarray:
    L = spec.dim - 1
    if k is None:
        return np.zeros(L)
    k = np.atleast_1d(np.asarray(k))
    if k.shape != (L,):
        raise DimensionError(f"k needs {L} components")
    return k


def phi_internal(spec: LatticeSpec, p, k=None):
    """One-step characteristic function from an internal node,
    ``(cosh p - eps_M sinh p)/M + sum_a (cos k_a + i eps_a sin k_a)/M``."""
    M = spec.dim
    k = _k_vec(spec, k)
    lat = np.sum(np.cos(k) + 1j * spec.eps[:-1] * np.sin(k))
    val = (np.cosh(p) - spec.eps[-1] * np.sinh(p)) / M + lat / M
    return val


def surface_characteristic(spec: LatticeSpec, k=None):
    """Characteristic function of one ``g``-fold surface jump."""
    M = spec.dim
    k = _k_vec(spec, k)
    single = np.sum(np.cos(k) + 1j * spec.eps_surface * np.sin(k)) / (M - 1)
    return single ** spec.g_fold


def phi_boundary(spec: LatticeSpec, p, k=None):
    """One-step characteristic function from a boundary node with the
    trapping branch removed, ``(1-sigma_a)/M e^{-p} + (M-1)/M chi_g(k)``."""
    M = spec.dim
    return spec.p_up * np.exp(-p) + (M - 1) / M * surface_characteristic(spec, k)


def _normal_rhs(spec: LatticeSpec, s, k):
    """``c`` in ``cosh p - eps_M sinh p = c`` equivalent to ``Phi = e^s``."""
    M = spec.dim
    k = _k_vec(spec, k)
    lat = np.sum(np.cos(k) + 1j * spec.eps[:-1] * np.sin(k))
    return M * np.exp(s) - lat


def solve_varpi(spec: LatticeSpec, s, k=None, tol: float = ROOT_TOL):
    """Root ``varpi`` of ``Phi(varpi, k) = e^s`` with positive real part.

    For real ``s`` and ``k = 0`` the root is bracketed on the positive real
    axis (``Phi`` grows monotonically there beyond its minimum) and found by
    Brent's method. Otherwise a complex Newton iteration is used.

    Raises
    ------
    RootNotFound
    """
    k = _k_vec(spec, k)
    eps = spec.eps[-1]
    if np.isrealobj(s) and np.all(k == 0):
        s = float(s)
        if not s > 0:
            raise RootNotFound("s must be positive")
        target = _normal_rhs(spec, s, k).real

        def f(p):
            return np.cosh(p) - eps * np.sinh(p) - target

        lo = max(0.0, np.arctanh(eps)) if eps > 0 else 0.0
        hi = lo + 1.0
        while f(hi) < 0:
            hi *= 2.0
            if hi > 1e3:
                raise RootNotFound("could not bracket the root")
        try:
            root = optimize.brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
        except (ValueError, RuntimeError) as exc:
            raise RootNotFound(str(exc)) from exc
        # one Newton polish
        d = np.sinh(root) - eps * np.cosh(root)
        if d != 0:
            root = root - f(root) / d
        res = abs(phi_internal(spec, root, k) - np.exp(s))
        if res > tol * max(1.0, np.exp(s)):
            raise RootNotFound(f"residual {res:.3e}")
        return float(root)

    s = complex(s)
    if not s.real > 0:
        raise RootNotFound("Re s must be positive")
    c = _normal_rhs(spec, s, k)
    p0 = np.arctanh(eps)
    amp = np.sqrt(1.0 - eps * eps)
    # cosh(w) ~ 1 + w^2/2: generalises the small-s seed sqrt(2 M s)
    p = p0 + np.sqrt(2.0 * (c / amp - 1.0))
    for _ in range(100):
        f = np.cosh(p) - eps * np.sinh(p) - c
        d = np.sinh(p) - eps * np.cosh(p)
        if d == 0:
            break
        step = f / d
        p = p - step
        if abs(step) < 1e-15 * max(1.0, abs(p)):
            break
    if p.real < p0:
        p = 2 * p0 - p
    res = abs(phi_internal(spec, p, k) - np.exp(s))
    if not np.isfinite(res) or res > tol * max(1.0, abs(np.exp(s))) or p.real <= 0:
        raise RootNotFound(f"Newton iteration failed (residual {res:.3e})")
    return complex(p)


def _strip_lower(spec: LatticeSpec, s_real: float) -> float:
    """Most negative real ``p`` with ``Phi(p, 0) = e^{Re s}``."""
    eps = spec.eps[-1]
    target = _normal_rhs(spec, s_real, None).real
    f = lambda p: np.cosh(p) - eps * np.sinh(p) - target
    hi = min(0.0, np.arctanh(eps))
    lo = hi - 1.0
    while f(lo) < 0:
        lo *= 2.0
    return optimize.brentq(f, lo, hi, xtol=1e-14)


def boundary_generation_function(spec: LatticeSpec, s, k=None, n0: int = 0):
    """Transform of the boundary-layer occupation,
    ``g(s, k) = exp(-varpi n0) / (1 - e^{-s} phi(varpi, k))``."""
    w = solve_varpi(spec, s, k)
    return np.exp(-w * n0) / (1.0 - np.exp(-s) * phi_boundary(spec, w, k))


def generation_function(spec: LatticeSpec, s, p, k=None, n0: int = 0):
    """Closed-form generating function of the walk.

    Raises
    ------
    ConvergenceStrip
        If ``Re s <= 0`` or ``Re p`` lies below the strip where the
        defining series converges.
    """
    s_re = float(np.real(s))
    if not s_re > 0:
        raise ConvergenceStrip("Re s must be positive")
    if np.real(p) < 0 and np.real(p) <= _strip_lower(spec, s_re):
        raise ConvergenceStrip(f"Re p = {np.real(p):.4g} outside the convergence strip")
    es = np.exp(s)
    Phi = phi_internal(spec, p, k)
    phi = phi_boundary(spec, p, k)
    gb = boundary_generation_function(spec, s, k, n0)
    return (es - np.exp(p * n0) * (Phi - phi) * gb) / (es - Phi)


def functional_equation_residual(spec: LatticeSpec, s, p, k=None, n0: int = 0) -> float:
    """Relative residual of ``[e^s - Phi] G - e^s + e^{p n0} (Phi - phi) g``."""
    G = generation_function(spec, s, p, k, n0)
    gb = boundary_generation_function(spec, s, k, n0)
    Phi = phi_internal(spec, p, k)
    phi = phi_boundary(spec, p, k)
    lhs = (np.exp(s) - Phi) * G
    rhs = np.exp(s) - np.exp(p * n0) * (Phi - phi) * gb
    scale = max(abs(lhs), abs(rhs), abs(np.exp(s)))
    return float(abs(lhs - rhs) / scale)


def transforms_from_generating_function(spec: LatticeSpec, s: float, n0: int = 0,
                                        h: float = 1e-3) -> dict:
    """Exact moment transforms by differentiating the closed-form ``G``.

    Uses fourth-order central differences in ``p`` and ``k`` with step ``h``.
    """
    M = spec.dim
    L = M - 1
    one = 1.0 / (1.0 - np.exp(-s))

    def G(p=0.0, k=None):
        return generation_function(spec, s, p, np.zeros(L) if k is None else k, n0)

    def d1(f):
        return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)

    def d2(f):
        return (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h)

    def ek(a, x):
        k = np.zeros(L)
        k[a] = x
        return k

    G0 = G()
    U = np.zeros(M)
    Lm = np.zeros((M, M))
    U[-1] = (-d1(lambda x: G(p=x))).real
    Lm[-1, -1] = 0.5 * d2(lambda x: G(p=x)).real
    for a in range(L):
        U[a] = (-1j * d1(lambda x: G(k=ek(a, x)))).real
        Lm[a, a] = (-0.5 * d2(lambda x: G(k=ek(a, x)))).real
        mixed = d1(lambda y: d1(lambda x: G(p=y, k=ek(a, x))))
        Lm[a, -1] = Lm[-1, a] = (0.5j * mixed).real
        for b in range(a + 1, L):
            mixed = d1(lambda y: d1(lambda x: G(k=ek(a, x) + ek(b, y))))
            Lm[a, b] = Lm[b, a] = (-0.5 * mixed).real
    return {"R": float((one - G0).real), "U": U, "L": Lm}


def kernel_Ka(spec: LatticeSpec, s: float, n0: int = 0) -> float:
    """``exp(-varpi n0) / (s [s + 1 - phi(varpi, 0)])`` with ``varpi = varpi(s, 0)``."""
    w = solve_varpi(spec, s)
    return float(np.exp(-w * n0) / (s * (s + 1.0 - phi_boundary(spec, w).real)))


def closed_form_transforms(spec: LatticeSpec, s: float, n0: int = 0,
                           window: tuple[float, float] = (0.0, 0.02)) -> dict:
    """Small-``s`` moment transforms in lattice units.

    Returns ``R``, ``U`` (lateral then normal) and ``L`` (with vanishing
    mixed lateral-normal entries). Valid while ``s``, ``sigma_a`` and the
    drift parameters are small compared with ``varpi(s, 0)`` and the start
    depth ``n0`` is small compared with ``1 / varpi``; terms of relative
    order ``n0 varpi`` in ``L[-1, -1]`` are not included. Warns with
    :class:`~fpboundary.errors.OutOfAsymptoticRange` outside ``window``.
    """
    M = spec.dim
    L = M - 1
    g = spec.g_fold
    if not window[0] < s <= window[1]:
        warn_asymptotic(f"s = {s:.3g} outside the small-s window {window}")
    Ka = kernel_Ka(spec, s, n0)
    es = spec.eps_surface
    U = np.empty(M)
    U[-1] = Ka / M + spec.eps[-1] / (M * s * s)
    # boundary minus bulk lateral drift; equals (g - 1) eps_s when the two agree
    U[:-1] = (g * es - spec.eps[:-1]) * Ka / M + spec.eps[:-1] / (M * s * s)
    Lm = np.zeros((M, M))
    Lm[:-1, :-1] = ((g - 1) / (2 * M) * (np.eye(L) + g * np.outer(es, es) / (M - 1)) * Ka
                    + np.eye(L) / (2 * M * s * s))
    Lm[-1, -1] = 1.0 / (2 * M * s * s)
    return {"R": spec.sigma_a * Ka / M, "U": U, "L": Lm, "Ka": Ka}

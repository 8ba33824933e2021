"""Lattice random walk imitating half-space diffusion near an active wall.

The walk lives on a rectangular lattice aligned with the boundary basis:
lateral indices ``m_1 .. m_{M-1}`` and a layer index ``n >= 0``, with
``n = 0`` the boundary layer. Each step lasts ``tau_a``.

* From an internal node (``n >= 1``) the walker hops to one of its ``2M``
  neighbours, ``P(+-e_i) = (1 +- eps_i) / (2M)``.
* From a boundary node it moves up with probability ``(1 - sigma_a)/M``,
  is trapped for good with probability ``sigma_a/M``, or (probability
  ``(M-1)/M``) makes a long lateral jump made of ``g`` elementary
  in-layer hops, each ``+-e_alpha`` with ``(1 +- eps_s_alpha) / (2(M-1))``.

Random numbers come from per-batch Philox streams spawned from one seed, so
results depend on ``(seed, n_walkers, batch_size)`` only, never on the
number of worker threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    AbsorptionTooLarge,
    DimensionError,
    DriftTooLarge,
    EmptyEnsemble,
    TruncationBreach,
)
from .geometry import BoundaryBasis, frame_to_boundary_coords
from .singular import lattice_from_continuum

G_EXACT_THRESHOLD = 8
DEFAULT_BATCH = 16384
MAX_EPS = 0.5


@dataclass(frozen=True)
class LatticeSpec:
    """Discretisation of the half-space walk.

    Attributes
    ----------
    dim : int
        Space dimension ``M >= 2``.
    tau_a : float
        Hop duration.
    spacings : ndarray, shape (M,)
        Lattice spacings, lateral first, normal last.
    eps : ndarray, shape (M,)
        Bulk drift parameters ``eps_i``; ``eps[-1] > 0`` drifts away from
        the wall.
    sigma_a : float
        Trapping parameter in ``[0, 1)``.
    g_fold : int
        Number of elementary hops per surface jump.
    eps_surface : ndarray, shape (M-1,)
        Drift parameters of the elementary in-layer hops.
    D_normal : float
        Normal diffusivity of the continuum model, used for conversions.
    diffusivities : ndarray, shape (M,)
        Diagonal diffusivities in the boundary basis.
    n_z, n_xy : int or None
        Truncation depth and lateral half-width for exact evolution.
    """

    dim: int
    tau_a: float = 1.0
    spacings: np.ndarray | None = None
    eps: np.ndarray | None = None
    sigma_a: float = 0.0
    g_fold: int = 1
    eps_surface: np.ndarray | None = None
    D_normal: float = 1.0
    diffusivities: np.ndarray | None = None
    n_z: int | None = None
    n_xy: int | None = None

    def __post_init__(self):
        M = int(self.dim)
        if M < 2:
            raise DimensionError("the lattice walk needs M >= 2")

        def vec(val, size, default):
            arr = np.full(size, default, float) if val is None else np.atleast_1d(np.asarray(val, float))
            if arr.shape != (size,):
                raise DimensionError(f"expected {size} components, got {arr.shape}")
            arr.setflags(write=False)
            return arr

        object.__setattr__(self, "dim", M)
        object.__setattr__(self, "spacings", vec(self.spacings, M, 1.0))
        object.__setattr__(self, "eps", vec(self.eps, M, 0.0))
        object.__setattr__(self, "eps_surface", vec(self.eps_surface, M - 1, 0.0))
        if self.diffusivities is None:
            diff = self.spacings**2 / (2.0 * self.tau_a * M)
        else:
            diff = self.diffusivities
        object.__setattr__(self, "diffusivities", vec(diff, M, 0.0))
        object.__setattr__(self, "g_fold", int(self.g_fold))
        if self.tau_a <= 0 or np.any(self.spacings <= 0):
            raise DimensionError("tau_a and spacings must be positive")
        if np.any(np.abs(self.eps) >= 1) or np.any(np.abs(self.eps_surface) >= 1):
            raise DriftTooLarge("drift parameters must satisfy |eps| < 1")
        if not 0.0 <= self.sigma_a < 1.0:
            raise AbsorptionTooLarge(f"sigma_a = {self.sigma_a} outside [0, 1)")
        if self.g_fold < 1:
            raise DimensionError("g_fold must be at least 1")

    @property
    def p_up(self) -> float:
        return (1.0 - self.sigma_a) / self.dim

    @property
    def p_trap(self) -> float:
        return self.sigma_a / self.dim

    @property
    def p_surface(self) -> float:
        return (self.dim - 1) / self.dim


def make_lattice(basis: BoundaryBasis, v, v_surface, sigma: float, l_upsilon: float,
                 tau_a: float, n_z: int | None = None, n_xy: int | None = None) -> LatticeSpec:
    """Lattice imitating a continuum model with an active boundary.

    Parameters
    ----------
    basis : BoundaryBasis
        Boundary-adapted basis of the continuum model.
    v : array_like, shape (M,)
        Bulk drift, in adapted-frame components (tangential then normal).
    v_surface : array_like, shape (M-1,)
        Boundary drift, tangential adapted-frame components.
    sigma, l_upsilon : float
        Surface absorption rate and surface diffusion length.
    tau_a : float
        Hop duration.

    Raises
    ------
    DriftTooLarge
        If any drift parameter reaches 0.5 in magnitude.
    AbsorptionTooLarge
        If the implied trapping parameter reaches one.
    """
    M = basis.dim
    if M < 2:
        raise DimensionError("the lattice walk needs M >= 2")
    if tau_a <= 0:
        raise DimensionError("tau_a must be positive")
    diff = np.asarray(basis.eigenvalues, float)
    a = np.sqrt(2.0 * tau_a * M * diff)
    v = np.zeros(M) if v is None else np.asarray(v, float)
    vs = np.zeros(M - 1) if v_surface is None else np.asarray(v_surface, float)
    v_b = frame_to_boundary_coords(basis, v)
    vs_b = basis.u @ vs
    eps = tau_a * v_b * M / a
    eps_s = tau_a * vs_b * M / a[:-1]
    big = max(np.max(np.abs(eps)), np.max(np.abs(eps_s), initial=0.0))
    if big >= MAX_EPS:
        raise DriftTooLarge(f"|eps| = {big:.3g} >= {MAX_EPS}; reduce tau_a")
    sigma_a, g = lattice_from_continuum(sigma, l_upsilon, tau_a, basis.D_normal, M)
    if sigma_a >= 1.0:
        raise AbsorptionTooLarge(f"sigma_a = {sigma_a:.3g} >= 1; reduce tau_a")
    return LatticeSpec(dim=M, tau_a=tau_a, spacings=a, eps=eps, sigma_a=sigma_a, g_fold=g,
                       eps_surface=eps_s, D_normal=basis.D_normal, diffusivities=diff,
                       n_z=n_z, n_xy=n_xy)


@dataclass(frozen=True)
class HopTable:
    """Move probabilities out of one node.

    ``displacements`` rows are lattice steps (lateral then normal). For
    boundary nodes the rows labelled ``"trap"`` and ``"surface"`` carry
    zero displacement; the surface row stands for a whole ``g``-fold jump.
    """

    labels: tuple[str, ...]
    displacements: np.ndarray
    probabilities: tuple

    def total(self):
        return sum(self.probabilities)


def hop_distribution(spec: LatticeSpec, node_kind: str = "internal", exact: bool = False) -> HopTable:
    """Probability table for a hop from an internal or a boundary node.

    With ``exact=True`` the probabilities are :class:`fractions.Fraction`
    values built from the binary floats of the spec, so their sum can be
    compared with one exactly.
    """
    M = spec.dim
    num = Fraction if exact else float

    if node_kind == "internal":
        labels, disp, probs = [], [], []
        for i in range(M):
            e = num(float(spec.eps[i]))
            for sign in (1, -1):
                step = np.zeros(M, int)
                step[i] = sign
                labels.append(f"{'+' if sign > 0 else '-'}{i + 1}")
                disp.append(step)
                probs.append((1 + sign * e) / (2 * M))
        return HopTable(tuple(labels), np.array(disp), tuple(probs))
    if node_kind == "boundary":
        s = num(float(spec.sigma_a))
        up = np.zeros(M, int)
        up[-1] = 1
        probs = ((1 - s) / M, s / M, num(M - 1) / M)
        return HopTable(("up", "trap", "surface"), np.array([up, np.zeros(M, int), np.zeros(M, int)]),
                        probs)
    if node_kind == "surface_hop":
        labels, disp, probs = [], [], []
        for a in range(M - 1):
            e = num(float(spec.eps_surface[a]))
            for sign in (1, -1):
                step = np.zeros(M - 1, int)
                step[a] = sign
                labels.append(f"{'+' if sign > 0 else '-'}{a + 1}")
                disp.append(step)
                probs.append((1 + sign * e) / (2 * (M - 1)))
        return HopTable(tuple(labels), np.array(disp), tuple(probs))
    raise ValueError(f"unknown node kind {node_kind!r}")


def surface_jump_moments(spec: LatticeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Mean vector and second-moment matrix of one ``g``-fold surface jump."""
    M, g = spec.dim, spec.g_fold
    es = spec.eps_surface
    mean = g * es / (M - 1)
    second = g * np.eye(M - 1) / (M - 1) + g * (g - 1) * np.outer(es, es) / (M - 1) ** 2
    return mean, second


def sample_surface_jump(spec: LatticeSpec, rng: np.random.Generator, size: int | None = None,
                        method: str = "auto") -> np.ndarray:
    """Lateral displacement of ``g``-fold surface jumps.

    Parameters
    ----------
    method : {"auto", "exact", "gaussian"}
        ``"exact"`` sums ``g`` elementary hops (drawn as one multinomial
        count). ``"gaussian"`` draws from the normal law with the same mean
        and covariance and rounds to the nearest node. ``"auto"`` uses the
        exact chain for ``g <= 8``.

    Returns
    -------
    ndarray of int, shape (size, M-1) or (M-1,)
    """
    M, g = spec.dim, spec.g_fold
    k = 1 if size is None else int(size)
    if method == "auto":
        method = "exact" if g <= G_EXACT_THRESHOLD else "gaussian"
    if method == "exact":
        p = np.array(hop_distribution(spec, "surface_hop").probabilities)
        counts = rng.multinomial(g, p / p.sum(), size=k)
        out = counts[:, 0::2] - counts[:, 1::2]
    elif method == "gaussian":
        mean, second = surface_jump_moments(spec)
        cov = second - np.outer(mean, mean)
        out = np.rint(rng.multivariate_normal(mean, cov, size=k, method="cholesky")).astype(np.int64)
    else:
        raise ValueError(f"unknown method {method!r}")
    return out[0] if size is None else out


@dataclass
class WalkerEnsemble:
    """State of a Monte Carlo run.

    Attributes
    ----------
    positions : ndarray of int, shape (N, M)
        Lateral indices then layer index. Trapped walkers keep the site
        where they were trapped.
    trapped : ndarray of bool, shape (N,)
    trap_time : ndarray of int, shape (N,)
        Step at which each walker was trapped, ``-1`` if still free.
    steps_elapsed : int
    seed : int
    n0 : int
        Starting layer.
    snapshots : dict
        ``{t: (positions, trapped)}`` copies taken at recorded steps.
    """

    positions: np.ndarray
    trapped: np.ndarray
    trap_time: np.ndarray
    steps_elapsed: int
    seed: int
    n0: int
    snapshots: dict = field(default_factory=dict)

    @property
    def n_walkers(self) -> int:
        return self.positions.shape[0]

    def trap_sites(self) -> np.ndarray:
        """Lateral sites of trapped walkers."""
        return self.positions[self.trapped, :-1]


def _hop_cumulative(spec: LatticeSpec) -> np.ndarray:
    p = np.array(hop_distribution(spec, "internal").probabilities)
    c = np.cumsum(p)
    c[-1] = 1.0
    return c


def _run_batch(spec: LatticeSpec, n0: int, n_steps: int, n: int, seed_seq: np.random.SeedSequence,
               record: set, surface_method: str, max_layer: int | None):
    rng = np.random.Generator(np.random.Philox(seed_seq))
    M = spec.dim
    pos = np.zeros((n, M), np.int64)
    pos[:, -1] = n0
    trapped = np.zeros(n, bool)
    trap_time = np.full(n, -1, np.int64)
    cum = _hop_cumulative(spec)
    p_up, p_trap = spec.p_up, spec.p_trap
    snaps = {}
    breach = False
    if 0 in record:
        snaps[0] = (pos.copy(), trapped.copy())
    for t in range(1, n_steps + 1):
        u = rng.random(n)
        layer = pos[:, -1]
        free = ~trapped
        inner = np.flatnonzero(free & (layer > 0))
        wall = np.flatnonzero(free & (layer == 0))

        move = np.searchsorted(cum, u[inner], side="right")
        move = np.minimum(move, 2 * M - 1)
        axis = move // 2
        sign = 1 - 2 * (move % 2)
        pos[inner, axis] += sign

        uw = u[wall]
        go_up = wall[uw < p_up]
        pos[go_up, -1] += 1
        caught = wall[(uw >= p_up) & (uw < p_up + p_trap)]
        trapped[caught] = True
        trap_time[caught] = t
        jumpers = wall[uw >= p_up + p_trap]
        if jumpers.size:
            pos[jumpers, :-1] += sample_surface_jump(spec, rng, jumpers.size, surface_method)

        if max_layer is not None and np.any(pos[:, -1] >= max_layer):
            breach = True
        if t in record:
            snaps[t] = (pos.copy(), trapped.copy())
    return pos, trapped, trap_time, snaps, breach


def resolve_threads(threads: int | None = None) -> int:
    """Worker count from the argument, else ``FPB_THREADS``, else 1."""
    if threads is None:
        env = os.environ.get("FPB_THREADS")
        threads = int(env) if env else 1
    return max(1, int(threads))


def simulate(spec: LatticeSpec, n0: int, n_steps: int, n_walkers: int, seed: int = 0,
             record_times=None, batch_size: int = DEFAULT_BATCH, threads: int | None = None,
             surface_method: str = "auto", max_layer: int | None = None) -> WalkerEnsemble:
    """Evolve independent walkers started in layer ``n0`` at lateral origin.

    Parameters
    ----------
    record_times : iterable of int, optional
        Steps at which to keep a snapshot for :func:`estimate_moments`.
    batch_size : int
        Walkers per random stream. Results are reproducible for fixed
        ``(seed, n_walkers, batch_size)`` whatever ``threads`` is.
    max_layer : int, optional
        Layer treated as a truncation edge. Reaching it raises
        :class:`TruncationBreach`; by default walkers are unbounded.
    """
    if n0 < 0 or n_steps < 0:
        raise ValueError("n0 and n_steps must be non-negative")
    if n_walkers <= 0:
        raise EmptyEnsemble("n_walkers must be positive")
    record = set(int(t) for t in (() if record_times is None else record_times))
    sizes = [min(batch_size, n_walkers - i) for i in range(0, n_walkers, batch_size)]
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    args = [(spec, n0, n_steps, k, ss, record, surface_method, max_layer) for k, ss in zip(sizes, seqs)]
    nthreads = min(resolve_threads(threads), len(sizes))
    if nthreads > 1:
        with ThreadPoolExecutor(nthreads) as pool:
            results = list(pool.map(lambda a: _run_batch(*a), args))
    else:
        results = [_run_batch(*a) for a in args]

    pos = np.concatenate([r[0] for r in results])
    trapped = np.concatenate([r[1] for r in results])
    ttime = np.concatenate([r[2] for r in results])
    snaps = {t: (np.concatenate([r[3][t][0] for r in results]),
                 np.concatenate([r[3][t][1] for r in results])) for t in sorted(record)
             if t <= n_steps}
    ens = WalkerEnsemble(pos, trapped, ttime, n_steps, seed, n0, snaps)
    if any(r[4] for r in results):
        err = TruncationBreach(f"a walker reached layer {max_layer}")
        err.ensemble = ens
        raise err
    return ens


@dataclass(frozen=True)
class MomentEstimates:
    """Moments of the walker distribution with standard errors.

    ``U`` and ``L`` sum over free walkers only (trapped walkers contribute
    nothing) and are normalised by the total walker count. Lattice-unit
    values use node counts; ``U_phys`` and ``L_phys`` are scaled by the
    spacings and refer to boundary-basis coordinates.
    """

    t: int
    tau: float
    R: float
    R_err: float
    U: np.ndarray
    U_err: np.ndarray
    L: np.ndarray
    L_err: np.ndarray
    U_phys: np.ndarray
    U_phys_err: np.ndarray
    L_phys: np.ndarray
    L_phys_err: np.ndarray
    n_walkers: int


def _mean_err(x: np.ndarray, axis=0):
    n = x.shape[axis]
    m = x.mean(axis=axis)
    if n > 1:
        err = x.std(axis=axis, ddof=1) / np.sqrt(n)
    else:
        err = np.zeros_like(m)
    return m, err


def moments_from_positions(pos: np.ndarray, trapped: np.ndarray, n0: int, spec: LatticeSpec,
                           t: int) -> MomentEstimates:
    """Moments of one snapshot (see :func:`estimate_moments`)."""
    N, M = pos.shape
    if N == 0:
        raise EmptyEnsemble("no walkers")
    start = np.zeros(M)
    start[-1] = n0
    live = (~trapped).astype(float)[:, None]
    X = (pos - start) * live
    R, R_err = _mean_err(trapped.astype(float))
    U, U_err = _mean_err(X)
    XX = 0.5 * X[:, :, None] * X[:, None, :]
    L, L_err = _mean_err(XX)
    a = spec.spacings
    aa = np.outer(a, a)
    return MomentEstimates(t, t * spec.tau_a, float(R), float(R_err), U, U_err, L, L_err,
                           U * a, U_err * a, L * aa, L_err * aa, N)


def estimate_moments(ensemble: WalkerEnsemble, spec: LatticeSpec, t: int | None = None) -> MomentEstimates:
    """Trapped fraction, mean displacement and half second moment.

    Parameters
    ----------
    t : int, optional
        Recorded step to use; defaults to the final state.

    Raises
    ------
    EmptyEnsemble
    """
    if ensemble.n_walkers == 0:
        raise EmptyEnsemble("no walkers")
    if t is None or t == ensemble.steps_elapsed:
        pos, trapped = ensemble.positions, ensemble.trapped
        t = ensemble.steps_elapsed
    else:
        pos, trapped = ensemble.snapshots[t]
    return moments_from_positions(pos, trapped, ensemble.n0, spec, t)

"""Experiment configuration.

Configs are INI files read with :mod:`configparser`. Vectors are
comma-separated numbers and matrix rows are separated by ``;``::

    [model]
    D = 2, 1; 1, 3
    n = 0, 1
    v = 0, 0            ; optional bulk drift, model coordinates
    g = 1, 0; 0, 1      ; optional metric

    [boundary]
    sigma = 0.3
    l_upsilon = 0.05
    v_surface = 0       ; optional, tangential adapted-frame components

    [lattice]
    tau_a = 1e-4
    walkers = 100000
    steps = 1000
    seed = 0
    n0 = 0
    surface_method = auto

    [solver]
    extent = 32, 10     ; lateral then normal (one value in 1D)
    cells = 64, 400
    T = 2.0
    source = 16, 0
    samples = 0.5, 1.0, 2.0

    [sweep]
    tau = 0.01, 0.02, 0.05

    [output]
    dir = out

Only the blocks a subcommand needs must be present.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .geometry import DiffusionModel, validate_model


def _floats(text: str, key: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.replace(",", " ").split()], float)
    except ValueError as exc:
        raise ConfigError(f"key '{key}': cannot parse numbers from {text!r}") from exc


def _matrix(text: str, key: str) -> np.ndarray:
    rows = [_floats(r, key) for r in text.split(";") if r.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ConfigError(f"key '{key}': rows must be non-empty and of equal length")
    return np.vstack(rows)


@dataclass(frozen=True)
class LatticeBlock:
    tau_a: float
    walkers: int = 100000
    steps: int = 1000
    seed: int = 0
    n0: int = 0
    surface_method: str = "auto"


@dataclass(frozen=True)
class SolverBlock:
    extent: np.ndarray
    cells: np.ndarray
    T: float
    source: np.ndarray
    samples: tuple = ()


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed configuration; absent blocks are None."""

    model: DiffusionModel | None = None
    sigma: float = 0.0
    l_upsilon: float = 0.0
    v_surface: np.ndarray | None = None
    lattice: LatticeBlock | None = None
    solver: SolverBlock | None = None
    sweep: tuple = ()
    out_dir: Path = Path(".")
    source: str = "<string>"
    raw: dict = field(default_factory=dict, repr=False)

    def require(self, *blocks: str) -> None:
        """Raise ConfigError unless every named block is present."""
        for b in blocks:
            present = {"model": self.model is not None, "lattice": self.lattice is not None,
                       "solver": self.solver is not None, "sweep": bool(self.sweep),
                       "boundary": "boundary" in self.raw}[b]
            if not present:
                raise ConfigError(f"{self.source}: missing section [{b}]")


def _get(sec, key, conv, default=None, required=False, section=""):
    if key not in sec:
        if required:
            raise ConfigError(f"missing key '{key}' in section [{section}]")
        return default
    try:
        return conv(sec[key])
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"key '{key}' in section [{section}]: {exc}") from exc


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    """Parse config text; see the module docstring for the grammar.

    Raises
    ------
    ConfigError
        On syntax errors, missing keys of a present block, or invalid values.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    raw = {s: dict(cp[s]) for s in cp.sections()}
    model = None
    if cp.has_section("model"):
        s = cp["model"]
        D = _get(s, "D", lambda t: _matrix(t, "D"), required=True, section="model")
        n = _get(s, "n", lambda t: _floats(t, "n"), required=True, section="model")
        v = _get(s, "v", lambda t: _floats(t, "v"), section="model")
        g = _get(s, "g", lambda t: _matrix(t, "g"), section="model")
        try:
            model = validate_model(DiffusionModel(D, n, v=v, g=g))
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"[model]: {exc}") from exc
    sigma = l_ups = 0.0
    vs = None
    if cp.has_section("boundary"):
        s = cp["boundary"]
        sigma = _get(s, "sigma", float, required=True, section="boundary")
        l_ups = _get(s, "l_upsilon", float, required=True, section="boundary")
        vs = _get(s, "v_surface", lambda t: _floats(t, "v_surface"), section="boundary")
        if sigma < 0 or l_ups < 0:
            raise ConfigError("[boundary]: sigma and l_upsilon must be non-negative")
    lattice = None
    if cp.has_section("lattice"):
        s = cp["lattice"]
        lattice = LatticeBlock(
            tau_a=_get(s, "tau_a", float, required=True, section="lattice"),
            walkers=_get(s, "walkers", int, 100000, section="lattice"),
            steps=_get(s, "steps", int, 1000, section="lattice"),
            seed=_get(s, "seed", int, 0, section="lattice"),
            n0=_get(s, "n0", int, 0, section="lattice"),
            surface_method=_get(s, "surface_method", str, "auto", section="lattice"),
        )
        if lattice.tau_a <= 0 or lattice.walkers <= 0 or lattice.steps < 0 or lattice.n0 < 0:
            raise ConfigError("[lattice]: tau_a and walkers must be positive, steps and n0 non-negative")
    solver = None
    if cp.has_section("solver"):
        s = cp["solver"]
        solver = SolverBlock(
            extent=_get(s, "extent", lambda t: _floats(t, "extent"), required=True, section="solver"),
            cells=_get(s, "cells", lambda t: _floats(t, "cells").astype(int), required=True,
                       section="solver"),
            T=_get(s, "T", float, required=True, section="solver"),
            source=_get(s, "source", lambda t: _floats(t, "source"), required=True, section="solver"),
            samples=tuple(_get(s, "samples", lambda t: _floats(t, "samples"), (), section="solver")),
        )
        if solver.extent.shape != solver.cells.shape or solver.source.shape != solver.cells.shape:
            raise ConfigError("[solver]: extent, cells and source need one entry per axis")
    sweep = ()
    if cp.has_section("sweep"):
        taus = _get(cp["sweep"], "tau", lambda t: _floats(t, "tau"), required=True, section="sweep")
        if taus.size == 0 or np.any(np.diff(taus) <= 0) or taus[0] < 0:
            raise ConfigError("[sweep]: tau list must be non-negative and strictly ascending")
        sweep = tuple(float(t) for t in taus)
    out_dir = Path(cp["output"].get("dir", ".")) if cp.has_section("output") else Path(".")
    return ExperimentConfig(model, float(sigma), float(l_ups), vs, lattice, solver, sweep,
                            out_dir, source, raw)


def load_config(path) -> ExperimentConfig:
    """Read and parse a config file.

    Raises
    ------
    ConfigError
        If the file cannot be read or parsed.
    """
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return parse_config(text, str(p))

"""``fpb`` command line.

Subcommands: ``basis``, ``walk``, ``evolve``, ``kernel``, ``solve`` and
``validate``. Exit codes: 0 success, 1 validation failure, 2 configuration
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import master
from .config import ExperimentConfig, load_config
from .errors import ConfigError, FPBError
from .fpsolver import BoundarySpec, Grid, boundary_spec, solve
from .geometry import DiffusionModel, basis_report, build_boundary_basis
from .lattice import estimate_moments, make_lattice, simulate
from .singular import BoundaryCoefficients, kernel_K, singular_moments_boundary_basis

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def fmt(x) -> str:
    """Float with 17 significant digits (round-trip safe)."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, data) -> None:
    # json writes floats with the shortest repr that round-trips exactly
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])


def _out_dir(args, cfg: ExperimentConfig | None) -> Path:
    out = Path(args.out) if args.out else (cfg.out_dir if cfg is not None else Path("."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _coeffs(cfg: ExperimentConfig) -> BoundaryCoefficients:
    return BoundaryCoefficients(cfg.sigma, cfg.l_upsilon, cfg.v_surface)


def _lattice(cfg: ExperimentConfig):
    cfg.require("model", "boundary", "lattice")
    basis = build_boundary_basis(cfg.model)
    v = cfg.model.v
    spec = make_lattice(basis, basis.frame.T @ cfg.model.g @ v, cfg.v_surface, cfg.sigma,
                        cfg.l_upsilon, cfg.lattice.tau_a)
    return basis, spec


def _sweep_steps(cfg: ExperimentConfig) -> list:
    lat = cfg.lattice
    if cfg.sweep:
        steps = sorted(set(int(round(t / lat.tau_a)) for t in cfg.sweep))
        return [s for s in steps if s <= lat.steps] or [0]
    return [lat.steps]


def _moment_header(M: int) -> list:
    h = ["step", "tau", "R", "R_err"]
    h += [f"U{i}" for i in range(M)] + [f"U{i}_err" for i in range(M)]
    h += [f"L{i}{j}" for i in range(M) for j in range(i, M)]
    h += [f"L{i}{j}_err" for i in range(M) for j in range(i, M)]
    return h


def _moment_row(e, M: int) -> list:
    iu = np.triu_indices(M)
    return ([e.t, e.tau, e.R, e.R_err] + list(e.U_phys) + list(e.U_phys_err)
            + list(e.L_phys[iu]) + list(e.L_phys_err[iu]))


def cmd_basis(args, cfg: ExperimentConfig) -> int:
    cfg.require("model")
    rep = basis_report(cfg.model)
    for k, v in rep.items():
        if isinstance(v, list):
            v = np.array(v)
            text = "; ".join(", ".join(fmt(x) for x in np.atleast_1d(row)) for row in np.atleast_2d(v))
        else:
            text = fmt(v)
        print(f"{k}: {text}")
    write_json(_out_dir(args, cfg) / "basis.json", rep)
    return EXIT_OK


def cmd_walk(args, cfg: ExperimentConfig) -> int:
    basis, spec = _lattice(cfg)
    lat = cfg.lattice
    seed = lat.seed if args.seed is None else args.seed
    steps = _sweep_steps(cfg)
    ens = simulate(spec, lat.n0, max(steps), lat.walkers, seed=seed, record_times=steps,
                   threads=args.threads, surface_method=lat.surface_method)
    M = spec.dim
    rows = [_moment_row(estimate_moments(ens, spec, t), M) for t in steps]
    path = _out_dir(args, cfg) / "walk_moments.csv"
    write_csv(path, _moment_header(M), rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def cmd_evolve(args, cfg: ExperimentConfig) -> int:
    basis, spec = _lattice(cfg)
    lat = cfg.lattice
    steps = _sweep_steps(cfg) if cfg.sweep else list(range(lat.steps + 1))
    series = master.evolve_layers(spec, lat.n0, max(steps))
    M = spec.dim
    a = spec.spacings
    iu = np.triu_indices(M)
    header = ["step", "tau", "R"] + [f"U{i}" for i in range(M)]
    header += [f"L{i}{j}" for i in range(M) for j in range(i, M)]
    rows = []
    for t in steps:
        x = series.at(t)
        rows.append([t, t * spec.tau_a, x["R"]] + list(x["U"] * a)
                    + list((x["L"] * np.outer(a, a))[iu]))
    path = _out_dir(args, cfg) / "evolve_moments.csv"
    write_csv(path, header, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def cmd_kernel(args, cfg: ExperimentConfig) -> int:
    cfg.require("model", "sweep")
    basis = build_boundary_basis(cfg.model)
    coeffs = _coeffs(cfg)
    M = basis.dim
    header = ["tau", "K_quad", "K_closed", "R"] + [f"U{i}" for i in range(M)]
    header += [f"L{i}{i}" for i in range(M - 1)]
    rows = []
    for tau in cfg.sweep:
        if tau <= 0:
            raise ConfigError("[sweep]: kernel needs positive tau values")
        s = singular_moments_boundary_basis(basis, coeffs, tau)
        rows.append([tau, kernel_K(tau, 0.0, basis.D_M, "quad"), s.kernel, s.R] + list(s.U)
                    + list(np.diag(s.L)))
    path = _out_dir(args, cfg) / "kernel.csv"
    write_csv(path, header, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def _solver_model(cfg: ExperimentConfig, dim: int):
    model = cfg.model
    if dim == model.dim:
        return model, boundary_spec(model, _coeffs(cfg))
    if dim == 1:
        # normal marginal: the surface terms integrate out over the wall
        basis = build_boundary_basis(model)
        vf = basis.frame.T @ model.g @ model.v
        m1 = DiffusionModel([[basis.D_normal]], [1.0], v=[vf[-1]])
        return m1, BoundarySpec(cfg.sigma)
    raise ConfigError(f"[solver]: grid dimension {dim} does not fit a model of dimension {model.dim}")


def cmd_solve(args, cfg: ExperimentConfig) -> int:
    cfg.require("model", "boundary", "solver")
    sv = cfg.solver
    if args.compare_mc:
        cfg.require("lattice")
        if sv.source[-1] != 0.0:
            raise ConfigError("[solver]: --compare-mc needs the source on the wall (normal coordinate 0)")
    grid = Grid.from_extent(sv.extent, sv.cells)
    model, bspec = _solver_model(cfg, grid.dim)
    res = solve(model, bspec, sv.source, sv.T, grid, sample_times=list(sv.samples))
    out = _out_dir(args, cfg)
    write_json(out / "diagnostics.json", {"dt": res.dt, "n_steps": res.n_steps,
                                          "ledger": res.diagnostics})
    write_csv(out / "solve_mass.csv", ["time", "bulk_mass", "absorbed_mass", "total_mass"],
              [[d["time"], d["bulk_mass"], d["absorbed_mass"], d["bulk_mass"] + d["absorbed_mass"]]
               for d in res.diagnostics])
    centers = [grid.centers(a) for a in range(grid.dim)]
    for k, f in enumerate(res.fields):
        mesh = np.meshgrid(*centers, indexing="ij")
        cols = [m.ravel() for m in mesh] + [f.G.ravel()]
        names = (["x", "z"] if grid.dim == 2 else ["z"]) + ["G"]
        write_csv(out / f"field_{k:03d}.csv", names, np.column_stack(cols))
    print(f"wrote {out}/solve_mass.csv, diagnostics.json and {len(res.fields)} field snapshots")
    if args.compare_mc:
        _, spec = _lattice(cfg)
        lat = cfg.lattice
        seed = lat.seed if args.seed is None else args.seed
        times = [d["time"] for d in res.diagnostics]
        steps = [int(round(t / spec.tau_a)) for t in times]
        ens = simulate(spec, 0, max(steps), lat.walkers, seed=seed, record_times=steps,
                       threads=args.threads, surface_method=lat.surface_method)
        rows = []
        for t, st, d in zip(times, steps, res.diagnostics):
            e = estimate_moments(ens, spec, st)
            rows.append([t, 1.0 - d["absorbed_mass"], 1.0 - e.R, e.R_err])
        path = out / "survival_compare.csv"
        write_csv(path, ["time", "pde_survival", "mc_survival", "mc_stderr"], rows)
        print(f"wrote {path}")
    return EXIT_OK


def cmd_validate(args, cfg: ExperimentConfig | None) -> int:
    from .validation import CHECKS, run_all

    names = args.checks.split(",") if args.checks else None
    if names:
        unknown = [n for n in names if n not in CHECKS]
        if unknown:
            raise ConfigError(f"unknown checks: {', '.join(unknown)}")
    overrides = {}
    if args.seed is not None:
        for n in ("mc_vs_exact", "scaling", "singular_amplitudes", "absorption_duality"):
            overrides[n] = {"seed": args.seed}
    if args.threads is not None:
        for n in ("mc_vs_exact", "scaling", "singular_amplitudes", "absorption_duality"):
            overrides.setdefault(n, {})["threads"] = args.threads
    report = run_all(names, progress=lambda r: print(r.line(), flush=True), **overrides)
    print(f"overall: {'PASS' if report.passed else 'FAIL'}")
    out = _out_dir(args, cfg)
    (out / "validation.json").write_text(report.to_json() + "\n")
    return EXIT_OK if report.passed else EXIT_VALIDATION


COMMANDS = {
    "basis": cmd_basis, "walk": cmd_walk, "evolve": cmd_evolve, "kernel": cmd_kernel,
    "solve": cmd_solve, "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config (INI)")
    common.add_argument("--seed", type=int, help="override the lattice seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, help="worker threads (default FPB_THREADS or 1)")
    p = argparse.ArgumentParser(prog="fpb", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "solve":
            sp.add_argument("--compare-mc", action="store_true",
                            help="also run the lattice walk and write both survival curves")
        if name == "validate":
            sp.add_argument("--checks", help="comma-separated subset of checks")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else None
        if cfg is None and args.command != "validate":
            raise ConfigError(f"'{args.command}' needs --config")
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FPBError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

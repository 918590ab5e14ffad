"""``chiralosc`` command-line interface.

Exit codes: 0 success, 1 check failure, 2 usage or config error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .. import dynamics as dyn
from .. import hamiltonians as ham
from .. import verify
from ..core import ChiralError, DimensionMismatch, NonConvergence, Params, SingularGramMatrix, ZeroMomentum
from .config import ConfigError, Output, RunConfig, parse_reals
from .files import TrajectoryReadError, read_metadata, read_trajectory, write_trajectory
from .svg import Figure

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
PLOT_KINDS = ("xy_curve", "orbit_JXJY", "paraboloid_residual", "invariant_drift")
SWEEP_PARAMS = ("lambda", "mass", "dt", "t_end")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


_NUMERIC = (NonConvergence, SingularGramMatrix, ZeroMomentum, FloatingPointError, OverflowError)


# -- parser ----------------------------------------------------------------------


def _run_flags(p: argparse.ArgumentParser, z0: bool = True) -> None:
    p.add_argument("--formulation", choices=[f.value for f in dyn.Formulation])
    p.add_argument("--lambda", dest="lam", type=float, help="chirality coefficient (nonzero)")
    p.add_argument("--mass", type=float)
    if z0:
        p.add_argument("--z0", help="initial state, comma-separated (8 full, 6 Darboux, 4 reduced); write --z0=-1,... for a leading minus")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--method", choices=[m.value for m in dyn.Method])
    p.add_argument("--seed", type=int, help="seed for the default initial state")
    p.add_argument("--config", help="JSON run configuration; flags override its fields")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chiralosc", description="Chiral oscillator simulations and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one formulation")
    _run_flags(p)
    p.add_argument("--out", action="append", default=[], help="output path (.csv or .json); repeatable")

    p = sub.add_parser("reduce", help="project a full trajectory onto the reduced space")
    p.add_argument("trajectory", help="full or Darboux trajectory file")
    p.add_argument("--triple", choices=[t.value for t in dyn.Triple], default="dirac")
    p.add_argument("--formulation", choices=[f.value for f in dyn.Formulation][:3])
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--mass", type=float)
    p.add_argument("--out", action="append", default=[])

    p = sub.add_parser("reconstruct", help="rebuild the configuration curve from a reduced trajectory")
    p.add_argument("trajectory")
    p.add_argument("--p0", help="linear momentum px,py (use --p0=-1,2 for a leading minus); "
                   "default: recorded in the file, else (l, 0)")
    p.add_argument("--x0", help="initial position x,y; default: recorded in the file, else 0,0")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--mass", type=float)
    p.add_argument("--out", action="append", default=[])

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", nargs="?", default="all")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--out", help="also write the JSON-lines report here")
    p.add_argument("--quiet", action="store_true", help="omit the summary table on stderr")

    p = sub.add_parser("plot", help="render a trajectory as SVG")
    p.add_argument("trajectory")
    p.add_argument("--kind", choices=PLOT_KINDS, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--formulation", choices=[f.value for f in dyn.Formulation])
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--mass", type=float)
    p.add_argument("--tolerance", type=float, default=1e-8, help="reference line for invariant_drift")

    p = sub.add_parser("sweep", help="run a parameter sweep concurrently")
    _run_flags(p)
    p.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=4)
    return parser


# -- helpers ---------------------------------------------------------------------


def _params(base: Params, lam, mass) -> Params:
    try:
        return Params(base.lam if lam is None else lam, base.mass if mass is None else mass)
    except ValueError as e:
        raise ConfigError("params", str(e)) from None


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError("config", f"cannot read {args.config}: {e}") from None
        cfg = RunConfig.from_dict(data)
    over = {
        "formulation": dyn.Formulation(args.formulation) if args.formulation else None,
        "params": _params(cfg.params, args.lam, args.mass),
        "dt": args.dt,
        "t_end": args.t_end,
        "method": dyn.Method(args.method) if args.method else None,
        "seed": args.seed,
    }
    if getattr(args, "z0", None):
        over["initial"] = parse_reals(args.z0, "initial")
    elif over["formulation"] and over["formulation"] is not cfg.formulation and cfg.initial:
        raise ConfigError("initial", f"config initial state does not fit {over['formulation'].value}")
    if getattr(args, "out", None) and isinstance(args.out, list):
        over["outputs"] = tuple(Output.from_path(p) for p in args.out)
    return cfg.with_overrides(**over)


def _integrate(cfg: RunConfig) -> dyn.Trajectory:
    y0 = cfg.initial_state()
    # errstate is thread-local, so sweeps running in threads do not interfere
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        try:
            traj = dyn.integrate(cfg.formulation, y0, cfg.params, cfg.dt, cfg.t_end, cfg.method)
        except DimensionMismatch as e:
            raise ConfigError("initial", str(e)) from None
        except _NUMERIC as e:
            raise CliError(EXIT_NUMERIC, f"integration failed: {e}") from None
    if not np.all(np.isfinite(traj.states)):
        raise CliError(EXIT_NUMERIC, "integration produced non-finite values")
    return traj


def _summary_lines(summary: dict) -> str:
    return "\n".join(f"{k:<10} {v:.3e}" for k, v in summary.items())


def _write_outputs(traj, outputs, **extra) -> None:
    for o in outputs:
        try:
            write_trajectory(traj, o.path, o.format, **extra)
        except OSError as e:
            raise CliError(EXIT_USAGE, f"cannot write {o.path}: {e}") from None


def _read(path, args, formulation=None) -> dyn.Trajectory:
    lam, mass = getattr(args, "lam", None), getattr(args, "mass", None)
    try:
        traj = read_trajectory(path, None, formulation)
        if lam is not None or mass is not None:
            traj = replace(traj, params=_params(traj.params, lam, mass))
        return traj
    except TrajectoryReadError as e:
        raise CliError(EXIT_USAGE, str(e)) from None


# -- commands --------------------------------------------------------------------


def cmd_simulate(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    traj = _integrate(cfg)
    summary = dyn.conservation_summary(traj)
    _write_outputs(traj, cfg.outputs, config=cfg.to_dict(), summary=summary)
    print(_summary_lines(summary), file=out)
    return EXIT_OK


def cmd_reduce(args, out=None) -> int:
    out = out or sys.stdout
    form = dyn.Formulation(args.formulation) if args.formulation else None
    traj = _read(args.trajectory, args, form)
    if traj.formulation is None or not (traj.formulation.is_full or traj.formulation is dyn.Formulation.DARBOUX_CANONICAL_H):
        raise CliError(EXIT_USAGE, "reduce needs a full-space or Darboux trajectory")
    try:
        red = dyn.project_full_to_reduced(traj, args.triple)
    except _NUMERIC as e:
        raise CliError(EXIT_NUMERIC, str(e)) from None
    summary = dyn.conservation_summary(red)
    z0 = dyn.to_full_states(traj)[0]
    _write_outputs(
        red, [Output.from_path(p) for p in args.out],
        triple=args.triple, summary=summary, p0=z0[4:6].tolist(), x0=z0[:2].tolist(),
    )
    print(_summary_lines(summary), file=out)
    return EXIT_OK


def cmd_reconstruct(args, out=None) -> int:
    out = out or sys.stdout
    traj = _read(args.trajectory, args, dyn.Formulation.REDUCED_LIE_POISSON)
    try:
        meta = read_metadata(args.trajectory)
    except TrajectoryReadError as e:
        raise CliError(EXIT_USAGE, str(e)) from None
    lsq = float(traj.states[0, 3])
    if args.p0:
        p0 = parse_reals(args.p0, "p0")
    elif "p0" in meta:
        p0 = tuple(meta["p0"])
    else:
        p0 = (float(np.sqrt(max(lsq, 0.0))), 0.0)
    if args.x0:
        x0 = parse_reals(args.x0, "x0")
    else:
        x0 = tuple(meta.get("x0", (0.0, 0.0)))
    if len(p0) != 2:
        raise ConfigError("p0", "expected two values")
    if len(x0) != 2:
        raise ConfigError("x0", "expected two values")
    try:
        conf = dyn.reconstruct(traj, p0, x0)
    except _NUMERIC as e:
        raise CliError(EXIT_NUMERIC, str(e)) from None
    except ChiralError as e:
        raise CliError(EXIT_USAGE, str(e)) from None
    _write_outputs(conf, [Output.from_path(p) for p in args.out], p0=list(p0), x0=list(x0))
    print(f"samples    {len(conf)}\nfinal_pos  {conf.states[-1, 0]:.17g},{conf.states[-1, 1]:.17g}", file=out)
    return EXIT_OK


def cmd_verify(args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        names = verify.check_names(args.suite)
    except ValueError as e:
        raise CliError(EXIT_USAGE, str(e)) from None
    params = _params(Params(), args.lam, args.mass)
    ctx = verify.Context(params, args.seed, None)
    results = []
    for name in names:
        r = verify.run_check(name, args.seed, params, ctx)
        print(r.to_json(), file=out, flush=True)
        results.append(r)
    if args.out:
        try:
            Path(args.out).write_text("".join(r.to_json() + "\n" for r in results), encoding="utf-8")
        except OSError as e:
            raise CliError(EXIT_USAGE, f"cannot write {args.out}: {e}") from None
    if not args.quiet:
        print(verify.format_table(results), file=err)
    return EXIT_OK if verify.all_ok(results) else EXIT_CHECK


def _config_curve(traj):
    if "x" in traj.labels:
        return traj.column("x"), traj.column("y")
    raise CliError(EXIT_USAGE, "xy_curve needs a trajectory with x and y columns")


def _reduced(traj):
    if traj.formulation is not dyn.Formulation.REDUCED_LIE_POISSON:
        raise CliError(EXIT_USAGE, "this plot needs a reduced trajectory")
    return traj.states


def render_plot(traj: dyn.Trajectory, kind: str, tolerance: float = 1e-8) -> str:
    p = traj.params
    if kind == "xy_curve":
        x, y = _config_curve(traj)
        return Figure("configuration curve", "x", "y", equal_aspect=True).line(x, y, "x(t), y(t)").render()
    if kind == "orbit_JXJY":
        s = _reduced(traj)
        fig = Figure("reduced orbit", "J_X", "J_Y", equal_aspect=True)
        jx, jy = s[:, 1], s[:, 2]
        if np.ptp(jx) + np.ptp(jy) < 1e-12:
            fig.marker(jx[0], jy[0], "fixed point")
        else:
            fig.line(jx, jy, "(J_X, J_Y)").marker(s[0, 3] / p.mass, 0.0, "center l^2/m")
        return fig.render()
    if kind == "paraboloid_residual":
        s = _reduced(traj)
        r = ham.paraboloid_function(p)(s)
        return Figure("paraboloid residual", "t", "residual").line(traj.times, r).render()
    if kind == "invariant_drift":
        if traj.formulation is None:
            raise CliError(EXIT_USAGE, "invariant_drift needs a formulation trajectory")
        _, H = dyn.system(traj.formulation, p)
        h = H(traj.states)
        drift = np.maximum.accumulate(np.abs(h - h[0]))
        floor = 1e-17
        fig = Figure("energy drift (running max)", "t", "log10 |H - H(0)|")
        fig.line(traj.times, np.log10(drift + floor), "drift").hline(np.log10(tolerance), f"tolerance {tolerance:g}")
        return fig.render()
    raise CliError(EXIT_USAGE, f"unknown plot kind {kind}")


def cmd_plot(args, out=None) -> int:
    out = out or sys.stdout
    form = dyn.Formulation(args.formulation) if args.formulation else None
    traj = _read(args.trajectory, args, form)
    text = render_plot(traj, args.kind, args.tolerance)
    try:
        Path(args.out).write_text(text, encoding="utf-8")
    except OSError as e:
        raise CliError(EXIT_USAGE, f"cannot write {args.out}: {e}") from None
    print(f"wrote {args.out}", file=out)
    return EXIT_OK


def cmd_sweep(args, out=None) -> int:
    out = out or sys.stdout
    base = load_config(args)
    values = parse_reals(args.values, "values")
    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise CliError(EXIT_USAGE, f"cannot create {outdir}: {e}") from None
    configs = []
    for v in values:
        if args.param in ("lambda", "mass"):
            params = _params(base.params, v if args.param == "lambda" else None, v if args.param == "mass" else None)
            cfg = base.with_overrides(params=params)
        else:
            cfg = base.with_overrides(**{args.param: v})
        path = outdir / f"{args.param}_{v!r}.csv"
        configs.append(replace(cfg, outputs=(Output(str(path), "csv"),)))

    def run(cfg):
        try:
            traj = _integrate(cfg)
        except CliError as e:
            return cfg, None, str(e)
        _write_outputs(traj, cfg.outputs)
        return cfg, dyn.conservation_summary(traj), None

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        results = list(pool.map(run, configs))
    code = EXIT_OK
    for cfg, summary, error in results:
        line = {"path": cfg.outputs[0].path, "lam": cfg.params.lam, "mass": cfg.params.mass, "dt": cfg.dt, "t_end": cfg.t_end}
        if error:
            line["error"], code = error, EXIT_NUMERIC
        else:
            line["summary"] = summary
        print(json.dumps(line), file=out)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.command == "simulate":
            return cmd_simulate(load_config(args))
        if args.command == "reduce":
            return cmd_reduce(args)
        if args.command == "reconstruct":
            return cmd_reconstruct(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "plot":
            return cmd_plot(args)
        return cmd_sweep(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK

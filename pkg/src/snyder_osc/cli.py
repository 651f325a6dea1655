"""Command line interface: ``snyder-osc {simulate,fourier,fock,grid,sweep}``.

Settings come from built-in defaults, then an optional INI config file
(``--config``; a ``[params]`` section plus one section per subcommand), then
command-line flags, which win. Exit codes: 0 success, 1 computational error,
2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import configparser
import itertools
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import fock, grid
from .errors import ComputationError, ConfigError, SnyderError
from .io import fmt, write_csv
from .params import validate
from .workflows import WORKFLOWS

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _float_list(text) -> list[float]:
    """``"0,0.05,0.1"`` or ``"start:stop:num"`` (inclusive linspace)."""
    text = str(text).strip()
    if not text:
        return []
    if ":" in text:
        start, stop, num = text.split(":")
        return [float(x) for x in np.linspace(float(start), float(stop), int(num))]
    return [float(x) for x in text.split(",") if x.strip()]


# (dest, section, type, default) for every option that a config file may set.
OPTIONS = {
    "common": [
        ("l", "params", float, None),
        ("omega", "params", float, None),
        ("mass", "params", float, 1.0),
        ("output", "output", str, "out"),
        ("plot", "output", _bool, False),
    ],
    "simulate": [
        ("periods", "simulate", float, 2.0),
        ("steps_per_period", "simulate", int, 1000),
        ("dt", "simulate", float, None),
        ("closed_form", "simulate", _bool, False),
    ],
    "fourier": [
        ("periods", "fourier", int, None),
        ("K", "fourier", int, 9),
        ("steps_per_period", "fourier", int, 1000),
        ("component", "fourier", str, "q"),
    ],
    "fock": [
        ("dim", "fock", int, 60),
        ("backend", "fock", str, fock.NORMAL_ORDERED),
        ("levels", "fock", int, 10),
        ("dump_matrix", "fock", _bool, False),
    ],
    "grid": [
        ("variant", "grid", str, grid.PLAIN),
        ("levels", "grid", int, 6),
        ("spacing", "grid", float, 0.02),
        ("rho_max", "grid", float, None),
        ("points", "grid", int, None),
    ],
    "sweep": [
        ("workflow", "sweep", str, None),
        ("l_values", "sweep", _float_list, None),
        ("omega_values", "sweep", _float_list, None),
        ("metrics", "sweep", str, None),
        ("jobs", "sweep", int, 1),
    ],
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="INI file with [params] and per-command sections")
    p.add_argument("--l", type=float, help="deformation length l >= 0")
    p.add_argument("--omega", type=float, help="angular frequency > 0")
    p.add_argument("--mass", type=float, help="mass > 0 (quantum commands; default 1)")
    p.add_argument("--output", help="output directory (default: out)")
    p.add_argument("--plot", action="store_const", const=True, default=None, help="also render PNG figures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="snyder-osc", description="Harmonic oscillator in 1-D Snyder space.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="classical trajectories (integrated and closed form)")
    _add_common(p)
    p.add_argument("--periods", type=float)
    p.add_argument("--steps-per-period", dest="steps_per_period", type=int)
    p.add_argument("--dt", type=float, help="explicit step (overrides --steps-per-period)")
    p.add_argument("--closed-form", dest="closed_form", action="store_const", const=True, default=None,
                   help="only evaluate the closed-form solution")

    p = sub.add_parser("fourier", help="harmonic content vs the first-order series")
    _add_common(p)
    p.add_argument("--periods", type=int, help="whole periods to analyse (>= 4, required)")
    p.add_argument("--K", type=int, help="highest harmonic (default 9)")
    p.add_argument("--steps-per-period", dest="steps_per_period", type=int)
    p.add_argument("--component", choices=("q", "p"))

    p = sub.add_parser("fock", help="number-basis Hamiltonian spectrum")
    _add_common(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--backend", choices=fock.BACKENDS)
    p.add_argument("--levels", type=int)
    p.add_argument("--dump-matrix", dest="dump_matrix", action="store_const", const=True, default=None)

    p = sub.add_parser("grid", help="finite-difference oracle spectrum")
    _add_common(p)
    p.add_argument("--variant", choices=(grid.PLAIN, grid.TILDE))
    p.add_argument("--levels", type=int)
    p.add_argument("--spacing", type=float, help="target grid spacing when --points is not given")
    p.add_argument("--rho-max", dest="rho_max", type=float)
    p.add_argument("--points", type=int)

    p = sub.add_parser("sweep", help="run a workflow over a grid of (l, omega)")
    _add_common(p)
    p.add_argument("--workflow", choices=sorted(WORKFLOWS))
    p.add_argument("--l-values", dest="l_values", type=_float_list, help="'a,b,c' or 'start:stop:num'")
    p.add_argument("--omega-values", dest="omega_values", type=_float_list)
    p.add_argument("--metrics", help="comma-separated metric names to keep")
    p.add_argument("--jobs", type=int)
    # workflow options forwarded to the cells
    p.add_argument("--periods", type=float)
    p.add_argument("--steps-per-period", dest="steps_per_period", type=int)
    p.add_argument("--closed-form", dest="closed_form", action="store_const", const=True, default=None)
    p.add_argument("--K", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--backend", choices=fock.BACKENDS)
    p.add_argument("--levels", type=int)
    p.add_argument("--variant", choices=(grid.PLAIN, grid.TILDE))
    p.add_argument("--spacing", type=float)
    return parser


def resolve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Merge defaults, config file and flags into one settings dict."""
    cfg = configparser.ConfigParser()
    cfg.optionxform = str
    if args.config is not None:
        if not args.config.is_file():
            parser.error(f"config file not found: {args.config}")
        cfg.read(args.config)
    sections = ["common", args.command]
    if args.command == "sweep":
        workflow = args.workflow or cfg.get("sweep", "workflow", fallback=None)
        if workflow in WORKFLOWS:
            sections.append(workflow)
    settings = {}
    for section in sections:
        for dest, cfg_section, conv, default in OPTIONS[section]:
            if dest in settings and getattr(args, dest, None) is None:
                continue
            value = getattr(args, dest, None)
            if value is None and cfg.has_option(cfg_section, dest):
                try:
                    value = conv(cfg.get(cfg_section, dest))
                except (ValueError, ConfigError) as exc:
                    parser.error(f"bad value for [{cfg_section}] {dest}: {exc}")
            if value is None:
                value = default
            settings[dest] = value
    for key in ("l", "omega"):
        if settings.get(key) is None and not (args.command == "sweep" and settings.get(f"{key}_values")):
            parser.error(f"--{key} is required (flag or [params] {key})")
    return settings


def _workflow_kwargs(command: str, s: dict) -> dict:
    if command == "simulate":
        return dict(periods=s["periods"], steps_per_period=s["steps_per_period"], dt=s["dt"],
                    closed_form_only=s["closed_form"])
    if command == "fourier":
        if s["periods"] is None:
            raise ConfigError("fourier requires --periods (flag or [fourier] periods)")
        return dict(periods=int(s["periods"]), K=s["K"], steps_per_period=s["steps_per_period"],
                    component=s["component"])
    if command == "fock":
        return dict(dim=s["dim"], backend=s["backend"], levels=s["levels"], dump_matrix=s["dump_matrix"])
    if command == "grid":
        return dict(variant=s["variant"], levels=s["levels"], spacing=s["spacing"],
                    rho_max=s["rho_max"], points=s["points"])
    raise ValueError(command)


def _write_tables(result, out_dir: Path) -> list[Path]:
    return [write_csv(out_dir / f"{stem}.csv", header, rows) for stem, (header, rows) in result.tables.items()]


def _plots(command: str, result, out_dir: Path) -> list[Path]:
    from . import plotting

    objs = result.objects
    if command == "simulate":
        traj = objs.get("integrated") or objs.get("closed_form")
        return plotting.trajectory_figures(traj, out_dir)
    if command == "fourier":
        return [plotting.harmonics_figure(objs["spectrum"], objs["rows"], out_dir / "harmonics.png")]
    if command == "fock":
        return [plotting.levels_figure(objs["spectrum"].eigenvalues, objs["reference"].eigenvalues,
                                       out_dir / "levels.png", label="Fock eigenvalues")]
    if command == "grid":
        return [plotting.levels_figure(objs["spectrum"].eigenvalues, objs["reference"],
                                       out_dir / "levels.png", label="grid eigenvalues")]
    return []


def _sweep_cell(job):
    workflow, l, omega, mass, kwargs = job
    try:
        params = validate(l, omega, mass)
        result = WORKFLOWS[workflow](params, **kwargs)
    except SnyderError as exc:
        return l, omega, type(exc).__name__, {}
    return l, omega, "ok", result.metrics


def run_sweep(s: dict, parser) -> int:
    workflow = s["workflow"]
    if workflow is None:
        parser.error("--workflow is required for sweep")
    l_values = s["l_values"] if s["l_values"] is not None else ([s["l"]] if s["l"] is not None else [])
    omegas = s["omega_values"] if s["omega_values"] is not None else (
        [s["omega"]] if s["omega"] is not None else [])
    if not l_values or not omegas:
        parser.error("sweep needs a non-empty range of l and omega values")
    if s["jobs"] < 1:
        parser.error("--jobs must be >= 1")
    try:
        kwargs = _workflow_kwargs(workflow, s)
    except ConfigError as exc:
        parser.error(str(exc))
    jobs = [(workflow, l, w, s["mass"], kwargs) for l, w in itertools.product(l_values, omegas)]
    if s["jobs"] > 1:
        with ProcessPoolExecutor(max_workers=s["jobs"]) as pool:
            cells = list(pool.map(_sweep_cell, jobs))
    else:
        cells = [_sweep_cell(j) for j in jobs]

    keep = None if not s["metrics"] else {m.strip() for m in s["metrics"].split(",")}
    rows = []
    for l, w, status, metrics in cells:
        if status != "ok":
            rows.append((l, w, s["mass"], workflow, status, "", ""))
            continue
        for name, value in metrics.items():
            if keep is None or name in keep:
                rows.append((l, w, s["mass"], workflow, status, name, value))
    out = write_csv(Path(s["output"]) / "sweep.csv",
                    ("l", "omega", "mass", "workflow", "status", "metric", "value"), rows)
    failed = sum(1 for c in cells if c[2] != "ok")
    print(f"sweep: {len(cells)} cells, {failed} failed -> {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        s = resolve(args, parser)
        if args.command == "sweep":
            return run_sweep(s, parser)
        if args.command == "fourier" and s["periods"] is None:
            parser.error("fourier requires --periods (flag or [fourier] periods)")
        params = validate(s["l"], s["omega"], s["mass"])
        result = WORKFLOWS[args.command](params, **_workflow_kwargs(args.command, s))
        out_dir = Path(s["output"])
        written = _write_tables(result, out_dir)
        if s["plot"]:
            written += _plots(args.command, result, out_dir)
    except ConfigError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ComputationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    summary = ", ".join(f"{k}={fmt(v)}" for k, v in result.metrics.items())
    print(f"{args.command}: {summary}")
    for path in written:
        print(f"  wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

    heisgeo eval SURFACE [--k K | --a A --b B --c C | --param k=1] [--domain X0 X1 Y0 Y1] [--n N]
    heisgeo solve --trace {zero,SURFACE} [params] [--domain ...] [--n N] [--max-iters I] [--tol T]
    heisgeo ode {item5,item6} [--r0 --r1 | --u0 --u1 --a0 --a1] --span T0 T1 --step H
    heisgeo check

Every command accepts ``--config file.json`` (keys are flag names with
underscores) and ``--out DIR``; explicit flags override the file.

Exit codes: 0 success, 2 usage error, 3 solver non-convergence, 4 ODE divergence.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import battery
from . import catalog as cat
from . import graph_geometry as gg
from . import ruled
from . import solver
from .scalar_field import Domain2, format_real

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_DIVERGED = 0, 2, 3, 4

DEFAULTS = {
    "eval": {"domain": [-1.0, 1.0, -1.0, 1.0], "n": 41, "out": "."},
    "solve": {"domain": [-1.0, 1.0, -1.0, 1.0], "n": 33, "max_iters": 50, "tol": 1e-10, "out": "."},
    "ode": {"out": "."},
    "check": {},
}

SURFACE_PARAMS = ("k", "a", "b", "c")


class UsageError(Exception):
    pass


def _finite_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def _key_value(text: str) -> tuple[str, float]:
    key, sep, val = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), _finite_float(val)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of parameters (flags override)")
    p.add_argument("--out", help="output directory")


def _add_surface_params(p: argparse.ArgumentParser) -> None:
    for name in SURFACE_PARAMS:
        p.add_argument(f"--{name}", type=_finite_float)
    p.add_argument("--param", type=_key_value, action="append", metavar="KEY=VALUE")


def _add_grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", type=_finite_float, nargs=4, metavar=("X0", "X1", "Y0", "Y1"))
    p.add_argument("--n", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heisgeo", description="Surface geometry in the Heisenberg group H3.")
    sub = parser.add_subparsers(dest="command", required=True)
    parser.commands = sub.choices  # type: ignore[attr-defined]
    S = argparse.SUPPRESS

    p = sub.add_parser("eval", argument_default=S, help="evaluate catalog geometry on a grid")
    p.add_argument("surface", choices=sorted(cat.CLI_IDS))
    _add_surface_params(p)
    _add_grid(p)
    _add_common(p)

    p = sub.add_parser("solve", argument_default=S, help="solve the minimal-graph Dirichlet problem")
    p.add_argument("--trace", choices=["zero", *sorted(cat.CLI_IDS)])
    _add_surface_params(p)
    _add_grid(p)
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--tol", type=_finite_float)
    _add_common(p)

    p = sub.add_parser("ode", argument_default=S, help="integrate the ruled-minimal ODEs")
    p.add_argument("system", choices=["item5", "item6"])
    for name in ("r0", "r1", "u0", "u1", "a0", "a1"):
        p.add_argument(f"--{name}", type=_finite_float)
    p.add_argument("--span", type=_finite_float, nargs=2, metavar=("T0", "T1"))
    p.add_argument("--step", type=_finite_float)
    _add_common(p)

    p = sub.add_parser("check", argument_default=S, help="run the invariant battery")
    _add_common(p)
    return parser


def _merged(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    given = vars(ns).copy()
    cmd = given.pop("command")
    known = {a.dest for a in parser.commands[cmd]._actions} - {"help", "config"}
    cfg: dict = {}
    if "config" in given:
        try:
            cfg = json.loads(Path(given.pop("config")).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(cfg) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for key, val in cfg.items():
            for v in val if isinstance(val, list) else [val]:
                if isinstance(v, (int, float)) and not math.isfinite(v):
                    raise UsageError(f"config value {key} is not finite")
    return {"command": cmd, **DEFAULTS[cmd], **cfg, **given}


def _surface_params(opts: dict) -> dict[str, float]:
    params = {k: float(opts[k]) for k in SURFACE_PARAMS if k in opts}
    for key, val in opts.get("param") or []:
        params[key] = float(val)
    return params


def _domain(opts: dict) -> Domain2:
    try:
        return Domain2(*map(float, opts["domain"]))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad domain: {exc}") from None


def _surface(name: str, opts: dict) -> cat.CatalogSurface:
    try:
        return cat.from_cli(name, _surface_params(opts))
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _outdir(opts: dict) -> Path:
    out = Path(opts.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_eval(opts: dict) -> int:
    surface = _surface(opts["surface"], opts)
    dom = _domain(opts)
    n = int(opts["n"])
    if n < 2:
        raise UsageError("--n must be at least 2")
    X, Y = np.meshgrid(np.linspace(dom.x_min, dom.x_max, n), np.linspace(dom.y_min, dom.y_max, n))
    x, y = X.ravel(), Y.ravel()
    cols = gg.field_table(surface.jet(x, y), x, y)
    path = _outdir(opts) / f"eval_{opts['surface']}.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(cols))
        for row in zip(*cols.values()):
            w.writerow([format_real(v) for v in row])
    print(f"{surface.label}: {len(x)} points -> {path}; max |H| = {np.max(np.abs(cols['H'])):.3e}")
    return EXIT_OK


def cmd_solve(opts: dict) -> int:
    if "trace" not in opts:
        raise UsageError("--trace is required")
    dom = _domain(opts)
    if opts["trace"] == "zero":
        if _surface_params(opts):
            raise UsageError("the zero trace takes no parameters")
        trace, label = (lambda x, y: np.zeros_like(x)), "zero"
    else:
        surface = _surface(opts["trace"], opts)
        trace, label = surface.field, surface.label
    try:
        config = solver.SolverConfig(max_newton_iters=int(opts["max_iters"]), residual_tol=float(opts["tol"]))
        problem = solver.DirichletProblem(dom, trace, int(opts["n"]), config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = _outdir(opts)
    report = {"trace": label, "n": problem.n, "domain": dom.to_dict()}
    try:
        res = solver.solve(problem)
    except solver.SolverError as exc:
        report.update(
            converged=False,
            iterations=getattr(exc, "iterations", None),
            final_residual=getattr(exc, "residual", None),
            message=str(exc),
        )
        (out / "solve_report.json").write_text(json.dumps(report, indent=2) + "\n")
        print(f"solve: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    res.field.to_csv(out / "solution.csv")
    report.update(
        converged=True,
        iterations=res.iterations,
        final_residual=res.residual,
        residual_history=res.residual_history,
    )
    (out / "solve_report.json").write_text(json.dumps(report, indent=2) + "\n")
    print(f"solve {label}: {res.iterations} Newton iterations, residual {res.residual:.3e}")
    return EXIT_OK


_ODE_ARGS = {"item5": ("r0", "r1"), "item6": ("u0", "u1", "a0", "a1")}


def cmd_ode(opts: dict) -> int:
    system = opts["system"]
    wanted = _ODE_ARGS[system]
    stray = [k for v in _ODE_ARGS.values() for k in v if k not in wanted and k in opts]
    if stray:
        raise UsageError(f"{system} does not take {stray}")
    missing = [k for k in (*wanted, "span", "step") if k not in opts]
    if missing:
        raise UsageError(f"missing {missing}")
    init = [float(opts[k]) for k in wanted]
    span = tuple(map(float, opts["span"]))
    try:
        if system == "item5":
            traj = ruled.integrate_item5(*init, span, float(opts["step"]))
        else:
            traj = ruled.integrate_item6(*init, span, float(opts["step"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    except ruled.DivergenceError as exc:
        print(f"ode: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    path = _outdir(opts) / f"ode_{system}.csv"
    traj.to_csv(path)
    final = ", ".join(f"{c}={v:.12g}" for c, v in zip(traj.components, traj.states[-1]))
    print(f"{system}: {len(traj.t)} nodes -> {path}; final {final}")
    return EXIT_OK


def cmd_check(opts: dict) -> int:
    results = battery.run_battery()
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail} ({r.seconds:.2f}s)")
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} groups passed")
    return EXIT_OK if ok else 1


COMMANDS = {"eval": cmd_eval, "solve": cmd_solve, "ode": cmd_ode, "check": cmd_check}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        opts = _merged(ns, parser)
        return COMMANDS[opts["command"]](opts)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"heisgeo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

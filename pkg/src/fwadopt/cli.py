"""Command-line front end: ``fwadopt <command> --config PATH``.

Exit codes: 0 success, 2 usage or domain error, 3 solver or degenerate
instance, 4 file I/O.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import model
from .dynamics import equilibrium_set, integrate, phase_portrait, simulate_agents
from .equilibrium import (
    UNSEEDED,
    analyze,
    limit_equilibrium,
    predicted_r_sign,
    sensitivity_pi1,
    sensitivity_r,
    unseeded_equilibrium,
)
from .errors import (
    ConfigError,
    DegenerateInstanceError,
    DomainError,
    FirewallModelError,
    InvalidParameterError,
    NotApplicableError,
)
from .model import AdoptionState, ModelParams
from .policy import VIEWS, policy_report, price_of_anarchy, security_utility, seposh, social_utility, soposh

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4

REQUIRED = ("mu", "lambda", "gamma", "r", "c0", "c", "c1i", "c2i", "pi0", "Pi0", "Pi1")
ALIASES = {"intensity": "lambda"}
SWEEP_AXES = model.FLAT_KEYS
SWEEP_HEADER = ("value", "zeta", "zeta_prime", "x_star", "U_star", "V_star", "x_hat", "poa", "soposh", "seposh")


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    path: str


def _key_line(text: str, key: str) -> Optional[int]:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _where(path: str, text: str, key: str) -> str:
    line = _key_line(text, key)
    return f"{path}:{line}" if line else path


def _reject_duplicates(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise ConfigError(f"duplicate key {k!r}")
        seen[k] = v
    return seen


def parse_config(text: str, path: str = "<config>") -> RunConfig:
    """Validate a flat JSON parameter object."""
    try:
        raw = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")

    flat = {}
    for key, value in raw.items():
        name = ALIASES.get(key, key)
        if name not in model.FLAT_KEYS:
            raise ConfigError(f"{_where(path, text, key)}: unknown key {key!r}")
        if name in flat:
            raise ConfigError(f"{_where(path, text, key)}: {key!r} duplicates {name!r}")
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"{_where(path, text, key)}: {key!r} must be a finite number, got {value!r}")
        flat[name] = float(value)

    missing = [k for k in REQUIRED if k not in flat]
    if missing:
        raise ConfigError(f"{path}: missing key(s): {', '.join(missing)}")
    if "pi1" in flat and "alpha" in flat:
        raise ConfigError(f"{_where(path, text, 'alpha')}: pi1/alpha mutually exclusive")
    if "pi1" not in flat and "alpha" not in flat:
        raise ConfigError(f"{path}: one of pi1/alpha is required")

    flat["lam"] = flat.pop("lambda")
    try:
        params = ModelParams.from_flat(**flat)
    except (InvalidParameterError, DomainError) as exc:
        named = [k for k in raw if re.search(r"\b%s\b" % re.escape(ALIASES.get(k, k)), str(exc))]
        where = _where(path, text, named[0]) if named else path
        raise ConfigError(f"{where}: {exc}") from None
    return RunConfig(params, path)


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, path)


def _g(v) -> str:
    return "n/a" if v is None else f"{v:.9g}"


def _write_rows(path: str, header: Sequence[str], rows) -> None:
    # csv writes floats with repr, the shortest round-trip form
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_eval(cfg: RunConfig, args) -> int:
    p, x = cfg.params, args.x
    rows = [
        ("G_N", model.utility_nonadopter(x, p)),
        ("G_E", model.utility_adopter(x, p)),
        ("G_E'", model.utility_owner_enabled(x, p)),
        ("f", model.adoption_gap(x, p)),
        ("D", model.gap_slope(x, p)),
        ("P", model.stationary_intrusion_probability(x, p)),
    ]
    print(f"x={_g(x)}")
    for name, value in rows:
        print(f"{name}={_g(float(value))}")
    return EXIT_OK


def _optional(fn):
    try:
        return fn()
    except NotApplicableError:
        return None


def cmd_equilibrium(cfg: RunConfig, args) -> int:
    p = cfg.params
    x_star, rep = unseeded_equilibrium(p, args.tol)
    s_pi1 = _optional(lambda: sensitivity_pi1(p, tol=args.tol))
    s_r = _optional(lambda: sensitivity_r(p, tol=args.tol))
    limit = limit_equilibrium(p, args.tol)
    sign = {1: "+", -1: "-", 0: "0"}
    quantities = [
        ("zeta", rep.zeta),
        ("zeta_prime", rep.zeta_prime),
        ("classification", rep.classification),
        ("roots", " ".join(repr(r) for r in rep.roots)),
        ("roots_prime", " ".join(repr(r) for r in rep.roots_prime)),
        ("gap_monotone", str(rep.gap_monotone).lower()),
        ("x_star", x_star),
        ("dx_star_dPi1", s_pi1),
        ("dx_star_dr", s_r.estimate if s_r else None),
        ("dx_star_dr_predicted_sign", sign[predicted_r_sign(p)]),
        ("x_star_limit", limit.value),
    ]
    for name, value in quantities:
        print(f"{name}={_g(value) if isinstance(value, float) or value is None else value}")
    if args.csv:
        _write_rows(args.csv, ("quantity", "value"), [(n, "" if v is None else v) for n, v in quantities])
    return EXIT_OK


def _start(args) -> AdoptionState:
    if args.start is None:
        return UNSEEDED
    y, x = args.start
    return AdoptionState(y=y, x=x)


def cmd_simulate(cfg: RunConfig, args) -> int:
    if not args.horizon > 0:
        raise InvalidParameterError(f"horizon must be positive, got {args.horizon!r}")
    start = _start(args)
    if args.mode == "ode":
        traj = integrate(cfg.params, start, args.horizon, step=args.step)
    else:
        if args.seed is None:
            raise InvalidParameterError("--seed is required for agent simulation")
        traj, _ = simulate_agents(cfg.params, args.n, start, args.horizon, args.seed)
    rows = list(traj.rows())
    if args.out:
        _write_rows(args.out, ("t", "y", "x", "region"), rows)
    else:
        end = rows[-1]
        print(f"rows={len(rows)} t={_g(end[0])} y={_g(end[1])} x={_g(end[2])} region={end[3]}")
    return EXIT_OK


def cmd_phase(cfg: RunConfig, args) -> int:
    if args.grid < 2:
        raise InvalidParameterError(f"grid must be at least 2, got {args.grid!r}")
    report = analyze(cfg.params)
    rows = phase_portrait(cfg.params, args.grid, report)
    eq = [(x, y, 0.0, 0.0, "equilibrium") for x, y in equilibrium_set(cfg.params, report)]
    _write_rows(args.out, ("x", "y", "dx", "dy", "region"), rows + eq)
    print(f"rows={len(rows)} equilibrium_rows={len(eq)}")
    return EXIT_OK


def cmd_policy(cfg: RunConfig, args) -> int:
    rep = policy_report(cfg.params, args.tol, grid=args.grid, jobs=args.jobs)
    for name in ("x_star", "x_hat", "u_star", "u_hat", "v_star", "v_hat", "poa", "pos", "inefficiency",
                 "soposh", "seposh"):
        print(f"{name}={_g(getattr(rep, name))}")
    if not rep.pi1_views:
        print("pi1_views=n/a (needs alpha)")
    for view in VIEWS:
        if view in rep.pi1_views:
            print(f"pi1_opt[{view}]={_g(rep.pi1_views[view])}")
    if args.csv:
        rows = [
            (view, c.Pi1, c.pi1, c.x_star, c.objective, str(c.interior).lower())
            for view in VIEWS
            for c in rep.curves.get(view, [])
        ]
        _write_rows(args.csv, ("view", "Pi1", "pi1", "x_star", "objective", "interior"), rows)
    return EXIT_OK


def _blank(fn):
    try:
        return fn()
    except (NotApplicableError, DegenerateInstanceError, InvalidParameterError, DomainError):
        return ""


def sweep_row(params: ModelParams, axis: str, value: float, tol: float) -> tuple:
    """One sweep line; quantities undefined at this point are left blank."""
    try:
        p = params.replace(**{axis: value})
    except (InvalidParameterError, DomainError):
        return (value,) + ("",) * (len(SWEEP_HEADER) - 1)
    x_star, rep = unseeded_equilibrium(p, tol)
    anarchy = _blank(lambda: price_of_anarchy(p, tol))
    return (
        value,
        "" if rep.zeta is None else rep.zeta,
        "" if rep.zeta_prime is None else rep.zeta_prime,
        x_star,
        float(social_utility(x_star, p)),
        _blank(lambda: float(security_utility(x_star, p))),
        anarchy.x_hat if anarchy != "" else "",
        anarchy.poa if anarchy != "" else "",
        _blank(lambda: soposh(p, tol)),
        _blank(lambda: seposh(p, tol)),
    )


def _sweep_task(task):
    return sweep_row(*task)


def cmd_sweep(cfg: RunConfig, args) -> int:
    axis = ALIASES.get(args.axis, args.axis)
    if axis not in SWEEP_AXES:
        raise InvalidParameterError(f"unknown sweep axis {args.axis!r}; expected one of {', '.join(SWEEP_AXES)}")
    if args.steps < 1:
        raise InvalidParameterError(f"steps must be positive, got {args.steps!r}")
    if args.hi < args.lo:
        raise InvalidParameterError("sweep range needs lo <= hi")
    values = [args.lo] if args.steps == 1 else np.linspace(args.lo, args.hi, args.steps).tolist()
    tasks = [(cfg.params, axis, v, args.tol) for v in values]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_task, tasks))
    else:
        rows = [_sweep_task(t) for t in tasks]
    _write_rows(args.out, SWEEP_HEADER, rows)
    print(f"rows={len(rows)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fwadopt", description="Firewall adoption model toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="flat JSON parameter file")
        sp.add_argument("--tol", type=float, default=1e-9, help="solver tolerance")
        sp.set_defaults(func=func)
        return sp

    sp = add("eval", cmd_eval, "utilities and gaps at one adoption level")
    sp.add_argument("--x", type=float, default=0.0)

    sp = add("equilibrium", cmd_equilibrium, "thresholds, equilibrium and sensitivities")
    sp.add_argument("--csv", help="write quantity,value rows here")

    sp = add("simulate", cmd_simulate, "mean-field ODE or finite agent population")
    sp.add_argument("--mode", choices=("ode", "agents"), default="ode")
    sp.add_argument("--n", type=int, default=1000, help="population size (agents)")
    sp.add_argument("--horizon", type=float, default=10.0)
    sp.add_argument("--step", type=float, default=None, help="ODE step")
    sp.add_argument("--seed", type=int, default=None, help="required for agents")
    sp.add_argument("--start", type=float, nargs=2, metavar=("Y", "X"), default=None)
    sp.add_argument("--out", help="CSV path; summary only when omitted")

    sp = add("phase", cmd_phase, "vector field on a simplex lattice")
    sp.add_argument("--grid", type=int, default=50)
    sp.add_argument("--out", required=True)

    sp = add("policy", cmd_policy, "welfare, anarchy and shortsightedness report")
    sp.add_argument("--grid", type=int, default=64, help="Pi1 sweep resolution")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--csv", help="write per-view objective curves here")

    sp = add("sweep", cmd_sweep, "equilibrium and policy metrics along one parameter")
    sp.add_argument("--axis", required=True)
    sp.add_argument("--lo", type=float, required=True)
    sp.add_argument("--hi", type=float, required=True)
    sp.add_argument("--steps", type=int, default=11)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", required=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        return args.func(cfg, args)
    except OSError as exc:
        print(f"fwadopt: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, InvalidParameterError, DomainError) as exc:
        print(f"fwadopt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotApplicableError, DegenerateInstanceError, ArithmeticError, FirewallModelError) as exc:
        print(f"fwadopt: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())

"""Command line frontend.

Subcommands::

    tripoint solve        solve a coupled system (config file and/or flags)
    tripoint verify-green grade the four kernel inequalities for (alpha, eta)
    tripoint scan         growth-ratio diagnostic for the source expressions

Exit codes: 0 success, 1 input error or failed certification, 2 solver did
not converge.  Numeric text output uses 17 significant digits so files
round-trip to the same doubles.
"""
from __future__ import annotations

import argparse
import copy
import json
import sys

import numpy as np

from .expr import EvalError, ParseError, parse
from .gridfn import GridFunction
from .kernel import ProblemParams
from .solver import SolveConfig, SolveError, solve
from .verify import certify_kernel, default_scales, growth_scan

__all__ = ["main", "build_parser", "DEFAULT_CONFIG"]

DEFAULT_CONFIG = {
    "alpha": None,
    "eta": None,
    "f": None,
    "h": None,
    "solver": {
        "nodes": 65,
        "tol": 1e-10,
        "max_iters": 200,
        "damping": 1.0,
        "quad_points": 8,
        "initial": "zero",
    },
    "outputs": {"csv": None, "json": None},
}


class InputError(ValueError):
    pass


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as err:
        raise InputError(f"cannot read config {path!r}: {err}") from err
    except json.JSONDecodeError as err:
        raise InputError(f"config {path!r} is not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise InputError(f"config {path!r} must hold a JSON object")
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    for key, value in data.items():
        if key not in cfg:
            raise InputError(f"unknown config key {key!r}")
        if key in ("solver", "outputs"):
            if not isinstance(value, dict):
                raise InputError(f"config key {key!r} must hold an object")
            for sub, subval in value.items():
                if sub not in cfg[key]:
                    raise InputError(f"unknown config key {key}.{sub}")
                cfg[key][sub] = subval
        else:
            cfg[key] = value
    return cfg


def _effective_config(args: argparse.Namespace) -> dict:
    cfg = _load_config(args.config) if args.config else copy.deepcopy(DEFAULT_CONFIG)
    for name in ("alpha", "eta", "f", "h"):
        value = getattr(args, name, None)
        if value is not None:
            cfg[name] = value
    overrides = {
        "nodes": args.nodes,
        "tol": args.tol,
        "max_iters": args.max_iter,
        "damping": args.damping,
        "quad_points": args.quad_points,
        "initial": args.initial,
    }
    for key, value in overrides.items():
        if value is not None:
            cfg["solver"][key] = value
    if args.out_csv is not None:
        cfg["outputs"]["csv"] = args.out_csv
    if args.out_json is not None:
        cfg["outputs"]["json"] = args.out_json
    return cfg


def _require(cfg: dict, key: str):
    if cfg.get(key) is None:
        raise InputError(f"{key} is required (set it in the config file or pass --{key})")
    return cfg[key]


def _parse_initial(raw) -> str | float:
    if isinstance(raw, (int, float)):
        return float(raw)
    if raw == "zero":
        return "zero"
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise InputError(f"initial must be 'zero' or a number, got {raw!r}") from None


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: str, nodes: np.ndarray, u: GridFunction, v: GridFunction) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,u,du,v,dv\n")
        for row in zip(nodes, u.values, u.derivs, v.values, v.derivs):
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_solve(args: argparse.Namespace) -> int:
    cfg = _effective_config(args)
    if args.dump_config:
        json.dump(cfg, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
        return 0
    p = ProblemParams(_require(cfg, "alpha"), _require(cfg, "eta"))
    f = parse(str(_require(cfg, "f")))
    h = parse(str(_require(cfg, "h")))
    s = cfg["solver"]
    solve_cfg = SolveConfig(
        max_iters=int(s["max_iters"]),
        tol=float(s["tol"]),
        damping=float(s["damping"]),
        nodes=int(s["nodes"]),
        quad_points=int(s["quad_points"]),
        initial=_parse_initial(s["initial"]),
    )
    solve_cfg.validate()
    state, report = solve(p, f, h, solve_cfg)
    print(
        f"converged: {str(report.converged).lower()}  iters: {report.iters}"
        f"  final step: {report.final_step_norm:.3e}"
    )
    print(f"residuals: u {report.residual_u:.3e}  v {report.residual_v:.3e}")
    print(f"bc defects: u {report.bc_defect_u:.3e}  v {report.bc_defect_v:.3e}")
    print(
        f"cone membership: u {str(report.cone_ok_u).lower()}"
        f"  v {str(report.cone_ok_v).lower()}"
        f"  positivity: {str(report.positivity_ok).lower()}"
    )
    if cfg["outputs"]["csv"]:
        _write_csv(cfg["outputs"]["csv"], state.nodes, state.u, state.v)
        print(f"wrote csv: {cfg['outputs']['csv']}")
    if cfg["outputs"]["json"]:
        _write_json(cfg["outputs"]["json"], report.to_dict())
        print(f"wrote report: {cfg['outputs']['json']}")
    return 0 if report.converged else 2


def _cmd_verify_green(args: argparse.Namespace) -> int:
    if args.grid < 11:
        raise InputError("grid too coarse: --grid must be >= 11")
    p = ProblemParams(args.alpha, args.eta)
    report = certify_kernel(p, grid_n=args.grid)
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(
            f"{status}  {check.description:45s} worst violation "
            f"{check.worst_violation:.3e} at (t={check.worst_t:.6g}, s={check.worst_s:.6g})"
        )
    if args.out_json:
        _write_json(args.out_json, report.to_dict())
        print(f"wrote report: {args.out_json}")
    return 0 if report.all_passed else 1


def _split_direction(text: str) -> tuple[str, str]:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return text[:i], text[i + 1 :]
    raise InputError(f"direction {text!r} must be two expressions 'phi,psi'")


def _direction_callable(src: str):
    e = parse(src)
    # directions are profiles of t only; y/yp would be circular here
    for name in ("y", "yp"):
        if _uses_variable(e.root, name):
            raise InputError(f"direction component {src!r} may only use the variable t")
    return lambda tg: e.eval_array(tg, np.zeros_like(tg), np.zeros_like(tg))


def _uses_variable(node, name: str) -> bool:
    from .expr import Bin, Call, Neg, Var

    if isinstance(node, Var):
        return node.name == name
    if isinstance(node, Neg):
        return _uses_variable(node.operand, name)
    if isinstance(node, Bin):
        return _uses_variable(node.lhs, name) or _uses_variable(node.rhs, name)
    if isinstance(node, Call):
        return any(_uses_variable(a, name) for a in node.args)
    return False


def _cmd_scan(args: argparse.Namespace) -> int:
    cfg = _effective_config(args)
    exprs = []
    for key in ("f", "h"):
        if cfg.get(key) is not None:
            exprs.append((key, parse(str(cfg[key]))))
    if not exprs:
        raise InputError("nothing to scan: provide --f and/or --h (or a config file)")
    directions = None
    if args.direction:
        directions = []
        for text in args.direction:
            phi_src, psi_src = _split_direction(text)
            directions.append((_direction_callable(phi_src), _direction_callable(psi_src)))
    scales = default_scales(args.scale_min, args.scale_max, args.scale_count)
    results = [(name, growth_scan(e, directions=directions, scales=scales)) for name, e in exprs]
    header = "scale" + "".join(f"  ratio_{name}" for name, _ in results)
    print(header)
    for i, c in enumerate(scales):
        row = _fmt(float(c)) + "".join(f"  {_fmt(float(scan.ratios[i]))}" for _, scan in results)
        print(row)
    if args.out_json:
        _write_json(
            args.out_json,
            {name: scan.to_dict() for name, scan in results},
        )
        print(f"wrote report: {args.out_json}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tripoint",
        description="Solve and certify coupled third-order three-point boundary value systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--eta", type=float)
        sp.add_argument("--f", help="source expression for the first equation")
        sp.add_argument("--h", help="source expression for the second equation")
        sp.add_argument("--nodes", type=int)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--max-iter", type=int)
        sp.add_argument("--damping", type=float)
        sp.add_argument("--quad-points", type=int)
        sp.add_argument("--initial")
        sp.add_argument("--out-csv")
        sp.add_argument("--out-json")

    sp = sub.add_parser("solve", help="solve the coupled system")
    add_common(sp)
    sp.add_argument("--dump-config", action="store_true", help="print the effective config and exit")
    sp.set_defaults(func=_cmd_solve)

    sp = sub.add_parser("verify-green", help="grade the kernel inequalities")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--eta", type=float, required=True)
    sp.add_argument("--grid", type=int, default=401)
    sp.add_argument("--out-json")
    sp.set_defaults(func=_cmd_verify_green)

    sp = sub.add_parser("scan", help="growth-ratio diagnostic")
    add_common(sp)
    sp.add_argument(
        "--direction",
        action="append",
        help="direction 'phi,psi' with both sides expressions in t (repeatable)",
    )
    sp.add_argument("--scale-min", type=float, default=1e-6)
    sp.add_argument("--scale-max", type=float, default=1e6)
    sp.add_argument("--scale-count", type=int, default=25)
    sp.set_defaults(func=_cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ParseError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except SolveError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except EvalError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

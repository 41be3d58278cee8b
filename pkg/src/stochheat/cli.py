"""Batch front-end: sweeps over (M, N) emitting CSV or JSON tables.

Modes
-----
exact   closed-form squared errors (spatial, temporal, total) at chosen times
bounds  lower/upper bound pairs of every kind
mc      Monte Carlo estimates against the truncated exact value
rates   log-log slopes of the exact errors along M (N = inf) and along N
verify  full sandwich lattice plus Monte Carlo cross-checks; exit 4 on failure

Exit codes: 0 success, 2 configuration error, 3 numerical error,
4 verification failure.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from typing import Sequence

from .bounds import full_bounds, smoothing_bounds, spatial_bounds, temporal_bounds
from .errors import DomainError, StochHeatError
from .exact import (
    Discretization,
    ErrorKind,
    projected_temporal_error_sq,
    smoothing_hs_exact,
    spatial_error_sq,
    sup_error,
    total_error_sq,
)
from .mc import McConfig, compare_to_exact, estimate_error_sq, truncated_exact_sq
from .rates import fit_loglog
from .spectral import DEFAULT_TOL, UNBOUNDED, HeatModel

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

MODES = ("exact", "bounds", "mc", "rates", "verify")
DEFAULT_LIST = "1,2,4,8,16,32,64"
MC_Z_THRESHOLD = 4.0
MC_MAX_WORK = 1024  # verify runs MC only on diagonal cells with M * N <= this


class ConfigError(StochHeatError):
    pass


def _int_list(text: str, allow_inf: bool = False) -> list:
    values = []
    for token in text.split(","):
        token = token.strip()
        if allow_inf and token.lower() == "inf":
            values.append(UNBOUNDED)
            continue
        try:
            value = int(token)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a positive integer: {token!r}") from None
        if value < 1:
            raise argparse.ArgumentTypeError(f"not a positive integer: {token!r}")
        values.append(value)
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError(f"list must be strictly increasing: {text!r}")
    return values


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochheat",
        description="Strong errors of the spectral Galerkin / exponential Euler scheme "
        "for the stochastic heat equation.",
    )
    parser.add_argument("--config", help="flat key=value file; command-line flags take precedence")
    parser.add_argument("--nu", type=float, default=1.0)
    parser.add_argument("--horizon", type=float, default=1.0)
    parser.add_argument("--M-list", dest="M_list", type=_int_list, default=DEFAULT_LIST)
    parser.add_argument(
        "--N-list", dest="N_list", type=lambda s: _int_list(s, allow_inf=True), default=DEFAULT_LIST
    )
    parser.add_argument("--mode", choices=MODES, default="exact")
    parser.add_argument("--t-list", dest="t_list", type=_float_list, default=None,
                        help="evaluation times for --mode exact (default: horizon)")
    parser.add_argument("--samples", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--K", type=int, default=None, help="MC mode truncation (default: N)")
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL)
    parser.add_argument("--refine", type=int, default=16)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default="-", help="output path, or - for stdout")
    return parser


def _read_config_file(path: str, parser: argparse.ArgumentParser) -> dict[str, str]:
    dests = {a.dest: a for a in parser._actions}
    flags = {opt.lstrip("-"): a.dest for a in parser._actions for opt in a.option_strings}
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            dest = flags.get(key, key.replace("-", "_"))
            if dest not in dests or dest in ("help", "config"):
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[dest] = value
    return values


def parse_args(argv: Sequence[str] | None) -> argparse.Namespace:
    parser = build_parser()
    pre, _ = parser.parse_known_args(argv)
    if pre.config:
        try:
            parser.set_defaults(**_read_config_file(pre.config, parser))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
    args = parser.parse_args(argv)
    for name in ("M_list", "N_list"):
        if isinstance(getattr(args, name), str):  # untouched default string
            setattr(args, name, _int_list(getattr(args, name), allow_inf=name == "N_list"))
    if not (args.nu > 0 and args.horizon > 0 and math.isfinite(args.nu * args.horizon)):
        raise ConfigError("--nu and --horizon must be positive and finite")
    if args.samples < 2:
        raise ConfigError("--samples must be at least 2")
    if not 0 <= args.seed < 2**64:
        raise ConfigError("--seed must be an unsigned 64-bit integer")
    if not args.tol > 0:
        raise ConfigError("--tol must be positive")
    if args.refine < 1 or args.workers < 1:
        raise ConfigError("--refine and --workers must be >= 1")
    if args.t_list is not None and any(not 0 <= t <= args.horizon for t in args.t_list):
        raise ConfigError("--t-list entries must lie in [0, horizon]")
    return args


def _fmt(value) -> str:
    if isinstance(value, float):
        return "inf" if math.isinf(value) else repr(value)
    return str(value)


def _jsonable(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def _finite(values):
    return [v for v in values if v != UNBOUNDED]


def run_exact(args, model) -> list[dict]:
    rows = []
    times = args.t_list if args.t_list is not None else [model.horizon]
    for M in args.M_list:
        for N in args.N_list:
            disc = Discretization(M, N, args.tol)
            for t in times:
                temporal = projected_temporal_error_sq(model, disc, t).squared
                spatial = 0.0 if N == UNBOUNDED else spatial_error_sq(model, N, t, args.tol).squared
                rows.append({"M": M, "N": N, "t": t, "spatial_sq": spatial,
                             "temporal_sq": temporal, "total_sq": spatial + temporal})
    return rows


def run_bounds(args, model) -> list[dict]:
    rows = []
    for M in args.M_list:
        for N in args.N_list:
            pairs = [temporal_bounds(model, M, N)]
            if N != UNBOUNDED:
                pairs += [spatial_bounds(model, N), full_bounds(model, M, N)]
            pairs.append(smoothing_bounds(model, N, model.horizon))
            for pair in pairs:
                rows.append({"kind": pair.kind.value, "M": M, "N": N,
                             "lower": pair.lower, "upper": pair.upper})
    return rows


def _mc_cell(args, model, M, N, K) -> dict:
    cfg = McConfig(args.samples, args.seed, workers=args.workers)
    mc = estimate_error_sq(model, M, N, K, cfg)
    exact = truncated_exact_sq(model, M, N, K, args.tol)
    return {"M": M, "N": N, "K": K, "samples": args.samples, "mean": mc.squared,
            "ci": mc.ci_halfwidth, "exact": exact.squared,
            "z": compare_to_exact(mc, exact, cfg.confidence_z)}


def run_mc(args, model) -> list[dict]:
    if UNBOUNDED in args.N_list:
        raise ConfigError("--mode mc needs finite N entries")
    if args.K is not None and args.K < max(args.N_list):
        raise ConfigError("--K must be >= every N")
    return [
        _mc_cell(args, model, M, N, args.K if args.K is not None else N)
        for M in args.M_list
        for N in args.N_list
    ]


def run_rates(args, model) -> list[dict]:
    T = model.horizon
    rows = []
    axes = [
        ("M", [(M, projected_temporal_error_sq(model, Discretization(M, UNBOUNDED, args.tol), T).root)
               for M in args.M_list]),
        ("N", [(N, spatial_error_sq(model, N, T, args.tol).root) for N in _finite(args.N_list)]),
    ]
    for axis, points in axes:
        if len(points) < 2:
            raise ConfigError(f"rates along {axis} need at least two values")
        fit = fit_loglog(points)
        rows.append({"axis": axis, "slope": fit.slope, "intercept": fit.intercept,
                     "r_squared": fit.r_squared, "points": fit.points_used})
    return rows


def _check(rows, check, M, N, value, lower, upper):
    ok = lower <= value <= upper
    rows.append({"check": check, "M": M, "N": N, "value": value, "lower": lower,
                 "upper": upper, "status": "pass" if ok else "FAIL"})


def run_verify(args, model) -> list[dict]:
    T = model.horizon
    rows: list[dict] = []
    for N in args.N_list:
        if N != UNBOUNDED:
            sb = spatial_bounds(model, N)
            value, argmax = sup_error(model, Discretization(1, N, args.tol), ErrorKind.SPATIAL, 1)
            _check(rows, "spatial", "-", N, value.root, sb.lower, sb.upper)
            _check(rows, "spatial_argmax", "-", N, argmax, T, T)
        smooth = smoothing_bounds(model, N, T)
        _check(rows, "smoothing", "-", N, smoothing_hs_exact(model, N, T, args.tol),
               smooth.lower, smooth.upper)
    for M in args.M_list:
        for N in args.N_list:
            disc = Discretization(M, N, args.tol)
            tb = temporal_bounds(model, M, N)
            at_T = projected_temporal_error_sq(model, disc, T).root
            sup, _ = sup_error(model, disc, ErrorKind.PROJECTED_TEMPORAL, args.refine)
            _check(rows, "temporal", M, N, at_T, tb.lower, sup.root)
            _check(rows, "temporal_sup", M, N, sup.root, at_T, tb.upper)
            if N != UNBOUNDED:
                fb = full_bounds(model, M, N)
                total = total_error_sq(model, disc, T).root
                total_sup, _ = sup_error(model, disc, ErrorKind.TOTAL, args.refine)
                _check(rows, "full", M, N, total, fb.lower, fb.upper)
                _check(rows, "full_sup", M, N, total_sup.root, total, fb.upper)
    finite_n = _finite(args.N_list)
    for M, N in zip(args.M_list, finite_n):
        if M * N > MC_MAX_WORK:
            continue
        cell = _mc_cell(args, model, M, N, N)
        _check(rows, "mc_z", M, N, cell["z"], -MC_Z_THRESHOLD, MC_Z_THRESHOLD)
    return rows


RUNNERS = {"exact": run_exact, "bounds": run_bounds, "mc": run_mc,
           "rates": run_rates, "verify": run_verify}


def _config_record(args) -> dict:
    return {
        "mode": args.mode, "nu": args.nu, "horizon": args.horizon,
        "M_list": args.M_list, "N_list": [_jsonable(n) for n in args.N_list],
        "t_list": args.t_list, "samples": args.samples, "seed": args.seed, "K": args.K,
        "tol": args.tol, "refine": args.refine, "format": args.format,
    }


def render(rows: list[dict], args) -> str:
    if args.format == "json":
        payload = {
            "config": _config_record(args),
            "rows": [{k: _jsonable(v) for k, v in row.items()} for row in rows],
        }
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        buf.write(",".join(rows[0]) + "\n")
        for row in rows:
            buf.write(",".join(_fmt(v) for v in row.values()) + "\n")
    return buf.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_args(argv)
        model = HeatModel(args.nu, args.horizon)
        rows = RUNNERS[args.mode](args, model)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_CONFIG if exc.code else EXIT_OK
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StochHeatError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    text = render(rows, args)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)

    failures = [r for r in rows if r.get("status") == "FAIL"]
    for r in failures:
        print(f"FAIL {r['check']} M={r['M']} N={_fmt(r['N'])}: "
              f"{r['value']!r} not in [{r['lower']!r}, {r['upper']!r}]", file=sys.stderr)
    return EXIT_VERIFY if failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``recurv verify | curvature | fit-recurrence``.

Exit status: 0 when every required check passed, 1 on any failure or
evaluation error, 2 on a configuration or usage error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .catalog import CatalogError, MetricSpec, ScaleFactor, build_metric, validate_spec
from .config import ConfigError, RunConfig, load_config
from .curvature import DomainError, build_pack
from .report import dumps, render, run_metadata
from .suite import exit_status, run_checks
from .tolerances import parse_overrides
from .verify import derived_identities, fit_recurrence_pack, psi_gradient_check

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser):
    p.add_argument("--output", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), help="report format (csv is the per-check summary)")
    p.add_argument("--seed", type=int, metavar="N", help="override the sampling seed")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="override a tolerance (repeatable)")
    p.add_argument("--kappa", type=float, metavar="X", help="coupling constant in G = kappa T (default 8 pi)")


def _metric_args(p: argparse.ArgumentParser):
    p.add_argument("--metric", required=True, help="metric family name")
    p.add_argument("--dim", type=int, default=4, help="dimension (default 4)")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                   help="family parameter, e.g. k=1 or M=1 (repeatable)")
    p.add_argument("--scale-factor", metavar="DESC", help="q(t) or eta descriptor, e.g. power:0.5")
    p.add_argument("--point", required=True, help="comma-separated coordinates")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="recurv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the checks listed in a config file")
    v.add_argument("--config", required=True, metavar="PATH")
    _common(v)

    c = sub.add_parser("curvature", help="dump the curvature pack of one metric at one point")
    _metric_args(c)
    c.add_argument("--order", type=int, default=3, choices=(2, 3, 4), help="metric jet order (default 3)")
    _common(c)

    f = sub.add_parser("fit-recurrence", help="fit the recurrence structure at one point")
    _metric_args(f)
    _common(f)
    return parser


def _spec_from_args(args) -> MetricSpec:
    params = {}
    for item in args.param:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param {item!r} is not NAME=VALUE")
        try:
            params[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"--param {name}: {value!r} is not a number") from None
    if "k" in params and params["k"] == int(params["k"]):
        params["k"] = int(params["k"])
    try:
        scale = ScaleFactor.parse(args.scale_factor) if args.scale_factor else None
        spec = MetricSpec(args.metric, args.dim, params, scale)
        validate_spec(spec)
    except CatalogError as exc:
        raise UsageError(str(exc)) from None
    return spec


def _point(text: str, n: int) -> np.ndarray:
    try:
        p = np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise UsageError(f"--point {text!r} is not a comma-separated list of numbers") from None
    if p.size != n:
        raise UsageError(f"--point has {p.size} coordinates, the metric has dimension {n}")
    return p


def _tolerances(base, items):
    try:
        return base.replace(**parse_overrides(items))
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc).strip("'\"")) from None


def _write(text: str, path: Optional[str]):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _verify(args) -> int:
    try:
        cfg: RunConfig = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    tol = _tolerances(cfg.tolerances, args.tol)
    seed = cfg.seed if args.seed is None else args.seed
    kappa = cfg.kappa if args.kappa is None else args.kappa
    fmt = {"csv": "csv-summary"}.get(args.format, args.format) or cfg.output_format
    records = run_checks(cfg.metrics, cfg.checks, cfg.points_per_metric, seed, tol, kappa)
    meta = run_metadata(seed, tol.as_dict(), {
        "points_per_metric": cfg.points_per_metric,
        "checks": list(cfg.checks),
        "kappa": kappa,
        "metrics": [m.to_json() for m in cfg.metrics],
    })
    _write(render(records, fmt, meta), args.output or cfg.output_path)
    status = exit_status(records)
    bad = sum(1 for r in records if r.status == "error" or (r.required and r.status == "fail"))
    print(f"{len(records)} records, {bad} failing; exit {status}", file=sys.stderr)
    return status


def _single(args, build) -> int:
    if args.format == "csv":
        raise UsageError(f"{args.command} writes JSON only")
    spec = _spec_from_args(args)
    point = _point(args.point, spec.dimension)
    f = build_metric(spec)
    if not f.contains(point):
        raise UsageError(f"point {point.tolist()} lies outside the domain of {spec.label}")
    _write(dumps(build(spec, f, point)), args.output)
    return EXIT_OK


def _curvature(args) -> int:
    return _single(args, lambda spec, f, point: build_pack(f, point, args.order).to_json())


def _fit(args) -> int:
    from .tolerances import DEFAULT

    tol = _tolerances(DEFAULT, args.tol)

    def build(spec, f, point):
        pack = build_pack(f, point, 4)
        fit = fit_recurrence_pack(pack, tol)
        return {
            "metric": spec.to_json(),
            "point": point.tolist(),
            "fit": fit.to_json(),
            "psi_gradient": psi_gradient_check(f, point, fit, tol=tol).to_json(),
            "derived": [r.to_json() for r in derived_identities(pack, fit, tol)],
        }

    return _single(args, build)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    handler = {"verify": _verify, "curvature": _curvature, "fit-recurrence": _fit}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

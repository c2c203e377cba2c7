"""Command-line front end: estimate, bound, experiment, version.

JSON results go to stdout and diagnostics to stderr, so output can be piped.
Exit codes: 0 success, 2 argument errors, 3 I/O errors, 4 numerical failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bounds import METHODS, BoundSpec, compute_bound
from .estimator import BandwidthGrid, MonteCarloPlan, blurred_tv_monte_carlo, blurred_tv_quadrature_1d, geometric_grid
from .experiments import EXPERIMENT_NAMES, ExperimentConfig, run_experiment
from .kernels import kernel_from_spec
from .measures import SampleIOError, load_sample
from .quadrature import QuadratureError

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blurtv",
        description="Blurred total variation estimation and distribution-free confidence bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_estimate_flags(p):
        p.add_argument("--x", required=True, help="CSV file with the first sample")
        p.add_argument("--y", required=True, help="CSV file with the second sample")
        p.add_argument("--dim", type=int, required=True, help="data dimension d")
        p.add_argument("--kernel", default="gaussian", help="'gaussian' or 'mix:<means>/<weights>/<sds>'")
        p.add_argument("--h", type=float, required=True, help="bandwidth (> 0)")
        p.add_argument("--mc", type=int, default=None, metavar="B", help="Monte Carlo sample size")
        p.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
        p.add_argument("--tol", type=float, default=1e-6, help="quadrature tolerance")

    p_est = sub.add_parser("estimate", help="estimate the blurred TV between two samples")
    add_estimate_flags(p_est)

    p_bound = sub.add_parser("bound", help="compute a confidence bound")
    add_estimate_flags(p_bound)
    p_bound.add_argument("--method", required=True, choices=METHODS)
    p_bound.add_argument("--alpha", type=float, required=True, help="miscoverage level in (0,1)")
    p_bound.add_argument("--hstar", type=float, default=None, help="lower bandwidth for the uniform LCB")
    p_bound.add_argument(
        "--grid",
        default=None,
        help="bandwidth grid: comma-separated values or lo:hi:ratio (geometric)",
    )

    p_exp = sub.add_parser("experiment", help="run a named simulation experiment")
    p_exp.add_argument("--name", required=True, help=f"one of: {', '.join(EXPERIMENT_NAMES)}")
    p_exp.add_argument("--config", default=None, help="JSON ExperimentConfig file")
    p_exp.add_argument("--out", required=True, help="output directory for the CSV")
    p_exp.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_exp.add_argument("--threads", type=int, default=1, help="worker cap for trial parallelism")

    sub.add_parser("version", help="print the library version")
    return parser


def _parse_grid(spec: str) -> BandwidthGrid:
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid spec {spec!r} must be lo:hi:ratio or comma-separated values")
        lo, hi, ratio = (float(p) for p in parts)
        return BandwidthGrid(tuple(geometric_grid(lo, hi, ratio)))
    return BandwidthGrid(tuple(sorted(float(x) for x in spec.split(","))))


def _load_pair(args):
    X = load_sample(args.x, args.dim, label="X")
    Y = load_sample(args.y, args.dim, label="Y")
    kernel = kernel_from_spec(args.kernel, args.dim)
    return X, Y, kernel


def _cmd_estimate(args) -> dict:
    X, Y, kernel = _load_pair(args)
    diagnostics: dict = {}
    if args.mc is not None:
        plan = MonteCarloPlan(B=args.mc, seed=args.seed)
        est = blurred_tv_monte_carlo(X, Y, kernel, args.h, plan, diagnostics=diagnostics)
        method = "monte_carlo"
        diagnostics["B"] = args.mc
        diagnostics["seed"] = args.seed
    else:
        if args.dim > 1:
            raise ValueError("quadrature unavailable above dimension 1; pass --mc B")
        est = blurred_tv_quadrature_1d(X, Y, kernel, args.h, args.tol)
        method = "quadrature"
        diagnostics["tol"] = args.tol
    return {
        "estimate": est,
        "method": method,
        "h": args.h,
        "n": X.n,
        "m": Y.n,
        "diagnostics": diagnostics,
    }


def _cmd_bound(args) -> dict:
    X, Y, kernel = _load_pair(args)
    if args.dim > 1 and args.method in ("naive", "uniform", "adaptive"):
        raise ValueError(f"method {args.method!r} uses quadrature, which is unavailable above dimension 1")
    spec = BoundSpec(
        method=args.method,
        alpha=args.alpha,
        h=args.h,
        B=args.mc,
        h_star=args.hstar,
        seed=args.seed,
    )
    grid = _parse_grid(args.grid) if args.grid else None
    result = compute_bound(spec, X, Y, kernel, grid=grid, tol=args.tol)
    return result.to_json_dict()


def _cmd_experiment(args) -> None:
    if args.name not in EXPERIMENT_NAMES:
        raise ValueError(f"unknown experiment {args.name!r}; valid names: {', '.join(EXPERIMENT_NAMES)}")
    if args.config is not None:
        config = ExperimentConfig.from_json_file(args.config)
        if config.experiment != args.name:
            raise ValueError(f"config is for {config.experiment!r}, not {args.name!r}")
    else:
        config = ExperimentConfig(experiment=args.name)
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, seed=args.seed)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = run_experiment(args.name, config, workers=max(1, args.threads))
    out_path = out_dir / f"{args.name}.csv"
    table.to_csv(out_path)
    print(f"{args.name}: wrote {len(table.rows)} rows to {out_path}")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "version":
            print(__version__)
        elif args.command == "estimate":
            print(json.dumps(_cmd_estimate(args), indent=2))
        elif args.command == "bound":
            print(json.dumps(_cmd_bound(args), indent=2))
        elif args.command == "experiment":
            _cmd_experiment(args)
        return 0
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, SampleIOError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except QuadratureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

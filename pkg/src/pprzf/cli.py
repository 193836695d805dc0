"""Command-line front end.

Subcommands:
  de-sweep   analytical sum-rate over a (snr, alpha, beta) grid
  mc-sweep   same grid with Monte-Carlo estimates alongside
  optimize   per-SNR search for the best (alpha, beta)
  validate   random-matrix limit probes and closed-form consistency checks
  repro      canned experiment presets (CSV + figure)

Exit codes: 0 success, 2 configuration error, 3 numerical failure (the
partial CSV is still written, with marker rows).
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .configio import (
    ConfigError,
    ExperimentSpec,
    Mode,
    network_config_from_mapping,
    parse_config_text,
    spec_from_text,
)
from .sweep import (
    CSV_COLUMNS,
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_OK,
    VALIDATION_COLUMNS,
    run,
    run_validation,
    write_csv,
)

__all__ = ["main", "entrypoint"]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="experiment config file (key = value text)")
    parser.add_argument("--output", help="CSV output path")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--trials", type=int, help="Monte-Carlo trials")
    parser.add_argument("--snr", type=float, nargs="+", help="SNR grid in dB")
    parser.add_argument("--alpha", type=float, nargs="+", help="alpha grid")
    parser.add_argument("--beta", type=float, nargs="+", help="beta grid")
    parser.add_argument("--p-db", type=float, dest="p_db",
                        help="absolute interference cap in dB (theta tracks the sweep)")
    parser.add_argument("--nu-mode", choices=("de", "mc"), dest="nu_mode",
                        help="normalization expectations: analytical or sampled")
    parser.add_argument("--bits", action="store_true",
                        help="report rates in bit/s/Hz instead of nats")
    parser.add_argument("--plot", action="store_true",
                        help="render a PNG next to the CSV")
    parser.add_argument("--threads", type=int,
                        help="worker threads for MC trials (default: PPRZF_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pprzf",
        description="Partially-projected regularized zero-forcing downlink simulator",
    )
    parser.add_argument("--version", action="version", version=f"pprzf {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, blurb in (
        ("de-sweep", "analytical sum-rate over a parameter grid"),
        ("mc-sweep", "Monte-Carlo sum-rate over a parameter grid"),
    ):
        p = sub.add_parser(name, help=blurb)
        _add_common(p)

    p = sub.add_parser("optimize", help="find the best (alpha, beta) per SNR")
    _add_common(p)
    p.add_argument("--objective", choices=("de", "mc"), default=None,
                   help="optimize the analytical or the simulated sum-rate")

    p = sub.add_parser("validate", help="limit probes and closed-form checks")
    p.add_argument("--suite", choices=("rmt", "quadratics", "specialcases", "all"),
                   default="all")
    p.add_argument("--output", help="CSV report path")
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--size", type=int, default=256, help="matrix dimension for probes")

    p = sub.add_parser("repro", help="canned experiment presets")
    p.add_argument("--figure", choices=("2", "3", "4", "5", "6"), required=True,
                   help="2: rate vs SNR accuracy; 3: parameter policies; "
                        "4: optimal alpha trend; 5: optimal beta trend; "
                        "6: equal-optimum tradeoff curve")
    p.add_argument("--outdir", default="repro_out")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--bits", action="store_true")
    p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p.add_argument("--threads", type=int)
    return parser


def _resolve_threads(value) -> int | None:
    if value is not None:
        return value
    env = os.environ.get("PPRZF_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            return None
    return None


def _spec_from_args(args, mode: Mode) -> ExperimentSpec:
    overrides = {}
    if args.snr is not None:
        overrides["snr_grid_db"] = tuple(args.snr)
    if args.alpha is not None:
        overrides["alpha_grid"] = tuple(args.alpha)
    if args.beta is not None:
        overrides["beta_grid"] = tuple(args.beta)
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.output is not None:
        overrides["output_path"] = args.output
    if args.p_db is not None:
        overrides["p_db"] = args.p_db
    if args.nu_mode is not None:
        overrides["nu_mode"] = args.nu_mode
    if getattr(args, "objective", None) is not None:
        overrides["objective"] = args.objective
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        base = spec_from_text(text)
        fields = {
            "config": base.config,
            "mode": mode,
            "snr_grid_db": base.snr_grid_db,
            "alpha_grid": base.alpha_grid,
            "beta_grid": base.beta_grid,
            "trials": base.trials,
            "seed": base.seed,
            "output_path": base.output_path,
            "p_db": base.p_db,
            "nu_mode": base.nu_mode,
            "objective": base.objective,
            "suite": base.suite,
        }
        fields.update(overrides)
        return ExperimentSpec(**fields)
    # flag-only invocation needs the network inline
    raise ConfigError("a --config file is required (network section cannot "
                      "be given by flags alone)")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("de-sweep", "mc-sweep", "optimize"):
            mode = {
                "de-sweep": Mode.DE_SWEEP,
                "mc-sweep": Mode.MC_SWEEP,
                "optimize": Mode.OPTIMIZE,
            }[args.command]
            spec = _spec_from_args(args, mode)
            rows, code = run(spec, n_workers=_resolve_threads(args.threads))
            write_csv(rows, spec.output_path, bits=args.bits)
            print(f"wrote {spec.output_path} ({len(rows)} rows)")
            if args.plot:
                from . import plotting

                png = os.path.splitext(spec.output_path)[0] + ".png"
                plotting.render_sweep(rows, png, bits=args.bits)
                print(f"wrote {png}")
            if code == EXIT_NUMERIC:
                print("numerical failures occurred; see marker rows", file=sys.stderr)
            return code
        if args.command == "validate":
            reports, code = run_validation(
                args.suite, seed=args.seed, n=args.size, n_trials=args.trials
            )
            for report in reports:
                print(f"[{report['status']:>4}] {report['suite']}/{report['check']}: "
                      f"value={report['value']:.6g} ref={report['reference']:.6g} "
                      f"err={report['error']:.3g} (tol {report['threshold']:.3g})")
            if args.output:
                write_csv(reports, args.output, columns=VALIDATION_COLUMNS)
                print(f"wrote {args.output}")
            return code
        if args.command == "repro":
            from .repro import run_figure

            if args.threads is not None:
                os.environ["PPRZF_THREADS"] = str(args.threads)
            artifacts = run_figure(
                args.figure, args.outdir, trials=args.trials, seed=args.seed,
                bits=args.bits, plot=not args.no_plot,
            )
            for path in artifacts:
                print(f"wrote {path}")
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    parser.error(f"unknown command {args.command!r}")
    return EXIT_CONFIG


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

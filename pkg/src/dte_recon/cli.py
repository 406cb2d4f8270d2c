"""Command-line interface: encode, subchannels, sweep, validate.

Exit codes: 0 success, 1 validation/property failure, 2 usage or parse
error, 3 infeasible parameter (SNR needing transmittance above 1).  The
``DTE_RECON_SEED`` environment variable overrides the default seed.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .channel import Detection, UnreachableSnrError, params_for_target_snr
from .estimators import MiEstimatorConfig, MiMethod, reports_to_csv, subchannel_report
from .recon import MonteCarloSettings, run_sweep, sweep_to_csv, sweep_to_json
from .transform import DteConfig, GaussianCdf, dte_sequence
from .validation import run_all

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

_FIG_GRID = tuple(round(-6.0 + 0.5 * i, 1) for i in range(25))

PRESETS = {
    "fig1": {"grid": _FIG_GRID, "depth": 4, "detections": (Detection.HETERODYNE,
                                                           Detection.HOMODYNE),
             "mod_variance": 1.0, "excess_noise": 0.02, "n": 10_000},
    "fig2": {"grid": _FIG_GRID, "depth": 4, "detections": (Detection.HETERODYNE,
                                                           Detection.HOMODYNE),
             "mod_variance": 1.0, "excess_noise": 0.02, "n": 10_000},
    "fig3": {"grid": _FIG_GRID, "depths": (2, 3, 4),
             "detections": (Detection.HETERODYNE, Detection.HOMODYNE),
             "mod_variance": 1.0, "excess_noise": 0.02, "n": 10_000},
}


def _default_seed() -> int:
    env = os.environ.get("DTE_RECON_SEED")
    return int(env) if env else 7


class _CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _parse_value_text(text: str) -> list[float]:
    """Parse newline- or comma-separated reals, reporting line and column."""
    values = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        col = 0
        for token in line.split(","):
            start = col + 1
            col += len(token) + 1
            if not token.strip():
                if token == line and not token.strip():
                    continue  # blank line
                raise _CliError(f"parse error at line {line_no}, column {start}: "
                                "empty value")
            try:
                values.append(float(token))
            except ValueError:
                raise _CliError(f"parse error at line {line_no}, column {start}: "
                                f"not a number: {token.strip()!r}") from None
    if not values:
        raise _CliError("parse error: input contains no values")
    return values


def _write_output(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_encode(args) -> int:
    if args.values is not None:
        raw = args.values
    elif args.input == "-":
        raw = sys.stdin.read()
    elif args.input is not None:
        try:
            with open(args.input, "r", encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as exc:
            raise _CliError(f"cannot read {args.input}: {exc}")
    else:
        raise _CliError("provide an input file, '-', or --values")
    xs = _parse_value_text(raw)
    try:
        dist = GaussianCdf(args.mean, args.std)
        matrix = dte_sequence(np.array(xs), dist, DteConfig(args.depth))
    except ValueError as exc:
        raise _CliError(str(exc))
    _write_output(args.output, matrix.to_text() + "\n")
    return EXIT_OK


def _resolve_detections(text: str) -> tuple[Detection, ...]:
    return tuple(Detection.parse(t) for t in text.split(","))


def _cmd_subchannels(args) -> int:
    preset = PRESETS.get(args.preset) if args.preset else None
    if preset is None and args.preset:
        raise _CliError(f"unknown preset {args.preset!r}")
    if preset:
        grid = preset["grid"]
        detections = preset["detections"]
        depth = preset["depth"]
        mod_variance, excess_noise = preset["mod_variance"], preset["excess_noise"]
        n = preset["n"]
    else:
        if args.snr_db is None:
            raise _CliError("--snr-db is required without a preset")
        grid = (args.snr_db,)
        detections = _resolve_detections(args.detection)
        depth = args.depth
        mod_variance, excess_noise = args.mod_variance, args.excess_noise
        n = args.n
    try:
        cfg = DteConfig(depth)
        est = MiEstimatorConfig(k_neighbors=args.k_neighbors,
                                method=MiMethod(args.method))
    except ValueError as exc:
        raise _CliError(str(exc))

    rows = []
    for det in detections:
        for target in grid:
            try:
                params = params_for_target_snr(target, mod_variance, excess_noise, det)
            except UnreachableSnrError as exc:
                if preset:
                    print(f"warning: skipping {exc}", file=sys.stderr)
                    continue
                raise
            reports = subchannel_report(params, cfg, n, args.repeats, args.seed, est)
            rows.append((params, reports))
    _write_output(args.output, reports_to_csv(rows))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    preset = PRESETS.get(args.preset) if args.preset else None
    if preset is None and args.preset:
        raise _CliError(f"unknown preset {args.preset!r}")
    if preset:
        grid = preset["grid"]
        depths = preset["depths"]
        detections = preset["detections"]
        mod_variance, excess_noise = preset["mod_variance"], preset["excess_noise"]
        n = preset["n"]
    else:
        if args.snr_start is None or args.snr_stop is None:
            raise _CliError("--snr-start and --snr-stop are required without a preset")
        count = int(round((args.snr_stop - args.snr_start) / args.snr_step)) + 1
        grid = tuple(round(args.snr_start + i * args.snr_step, 10)
                     for i in range(max(count, 0)))
        depths = tuple(int(d) for d in args.depths.split(","))
        detections = _resolve_detections(args.detections)
        mod_variance, excess_noise = args.mod_variance, args.excess_noise
        n = args.n
    if not grid:
        raise _CliError("empty SNR grid")
    try:
        mc = MonteCarloSettings(n=n, repeats=args.repeats, seed=args.seed)
        est = MiEstimatorConfig(k_neighbors=args.k_neighbors,
                                method=MiMethod(args.method))
        sweep = run_sweep(grid, depths, detections, mc, mod_variance,
                          excess_noise, est, threads=args.threads)
    except UnreachableSnrError as exc:
        raise _CliError(str(exc), EXIT_INFEASIBLE)
    except ValueError as exc:
        raise _CliError(str(exc))
    for warning in sweep.warnings:
        print(f"warning: skipped {warning}", file=sys.stderr)
    text = sweep_to_json(sweep) if args.format == "json" else sweep_to_csv(sweep)
    _write_output(args.output, text)
    _print_crossing_summary(sweep)
    return EXIT_OK


def _print_crossing_summary(sweep) -> None:
    """Largest grid SNR at which the reverse efficiency still exceeds 0.9."""
    print("beta_rr > 0.9 crossing summary (largest grid SNR above threshold):",
          file=sys.stderr)
    for det in sweep.detections:
        for depth in sweep.depths:
            pts = [p for p in sweep.points
                   if p.detection is det and p.depth == depth and p.beta_rr > 0.9]
            where = f"{max(p.snr_db for p in pts):+.1f} dB" if pts else "never"
            print(f"  {det.value:10s} depth {depth}: {where}", file=sys.stderr)


def _cmd_validate(args) -> int:
    results = run_all(seed=args.seed, quick=args.quick)
    width = max(len(r.name) for r in results)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}")
    if failed:
        print(f"{len(failed)} check(s) failed: " + ", ".join(r.name for r in failed))
        return EXIT_FAIL
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dte-recon",
        description="Distributional-transform expansion toolkit for CVQKD "
                    "information reconciliation")
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="expand a real sequence into bit planes")
    enc.add_argument("input", nargs="?", help="input file of reals ('-' for stdin)")
    enc.add_argument("--values", help="inline comma-separated values")
    enc.add_argument("--mean", type=float, default=0.0, help="marginal mean")
    enc.add_argument("--std", type=float, default=1.0, help="marginal std dev")
    enc.add_argument("--depth", type=int, default=3, help="expansion depth")
    enc.add_argument("-o", "--output", help="output path (default stdout)")
    enc.set_defaults(fn=_cmd_encode)

    subch = sub.add_parser("subchannels", help="estimate per-plane sub-channel parameters")
    subch.add_argument("--detection", default="het", help="hom, het, or both: 'hom,het'")
    subch.add_argument("--snr-db", type=float, help="target SNR in dB")
    subch.add_argument("--depth", type=int, default=4)
    subch.add_argument("--mod-variance", type=float, default=1.0)
    subch.add_argument("--excess-noise", type=float, default=0.02)
    subch.add_argument("--n", type=int, default=10_000)
    subch.add_argument("--repeats", type=int, default=100)
    subch.add_argument("--seed", type=int, default=_default_seed())
    subch.add_argument("--k-neighbors", type=int, default=2)
    subch.add_argument("--method", choices=("knn", "oracle"), default="knn",
                       help="plane-MI estimator: kNN or exact quadrature")
    subch.add_argument("--preset", choices=("fig1", "fig2"),
                       help="pin the figure-reproduction parameters")
    subch.add_argument("-o", "--output", help="output CSV path (default stdout)")
    subch.set_defaults(fn=_cmd_subchannels)

    sw = sub.add_parser("sweep", help="efficiency sweep over an SNR grid")
    sw.add_argument("--snr-start", type=float)
    sw.add_argument("--snr-stop", type=float)
    sw.add_argument("--snr-step", type=float, default=0.5)
    sw.add_argument("--depths", default="2,3,4")
    sw.add_argument("--detections", default="het,hom")
    sw.add_argument("--mod-variance", type=float, default=1.0)
    sw.add_argument("--excess-noise", type=float, default=0.02)
    sw.add_argument("--n", type=int, default=10_000)
    sw.add_argument("--repeats", type=int, default=50)
    sw.add_argument("--seed", type=int, default=_default_seed())
    sw.add_argument("--k-neighbors", type=int, default=2)
    sw.add_argument("--method", choices=("knn", "oracle"), default="knn",
                    help="plane-MI estimator: kNN or exact quadrature")
    sw.add_argument("--threads", type=int, default=1)
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--preset", choices=("fig3",))
    sw.add_argument("-o", "--output", help="output path (default stdout)")
    sw.set_defaults(fn=_cmd_sweep)

    val = sub.add_parser("validate", help="run the cross-module consistency suite")
    val.add_argument("--seed", type=int, default=_default_seed())
    val.add_argument("--quick", action="store_true", help="smaller Monte Carlo sizes")
    val.set_defaults(fn=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except UnreachableSnrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 1 invalid arguments, 2 I/O error, 3 malformed input
file, 4 fit failure, 5 self-test failure.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, fileio, selftest
from . import interferometer as ifm
from . import robustness, twinstate
from .errors import FitFailureError, InvalidArgumentError

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_PARSE, EXIT_FIT, EXIT_SELFTEST = range(6)

CURVE_LAMBDAS = (0.0, 0.5, 1.0)
NOISE_PAIRS = ((0.0, 1.0), (0.0, 0.5), (0.5, 1.0))

_PI_EXPR = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def parse_angle(text: str) -> float:
    """Radians from a number or a multiple of pi such as ``pi/2`` or ``3pi/2``."""
    m = _PI_EXPR.match(text)
    if m:
        coef, div = m.groups()
        if coef in (None, "", "+"):
            value = 1.0
        elif coef == "-":
            value = -1.0
        else:
            value = float(coef)
        value *= math.pi
        if div is not None:
            value /= float(div)
        return value
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"angle must be finite: {text!r}")
    return value


def _check_out_path(path: str | None):
    if path is None or path == "-":
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise CliError(f"cannot write to {path}: directory missing or not writable", EXIT_IO)
    if Path(path).is_dir():
        raise CliError(f"cannot write to {path}: is a directory", EXIT_IO)


def _emit(args, text: str):
    if args.out is None or args.out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(args.out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write to {args.out}: {exc.strerror}", EXIT_IO) from None


def _meta(args, **extra) -> dict:
    meta = {
        "command": args.command,
        "version": __version__,
        "phi_l": args.phi_l,
        "grid": args.grid,
        "seed": args.seed,
    }
    meta.update(extra)
    return meta


def _validate(args):
    if args.command in ("scan",) and not (0.0 <= args.lam <= 1.0):
        raise CliError(f"--lambda must lie in [0, 1], got {args.lam}", EXIT_INVALID)
    if getattr(args, "grid", 2) < 2:
        raise CliError("--grid needs at least 2 points", EXIT_INVALID)
    if args.command == "noise":
        try:
            robustness.NoiseSpec(args.rel_amp, args.dist, args.samples, args.seed)
        except InvalidArgumentError as exc:
            raise CliError(str(exc), EXIT_INVALID) from None
    _check_out_path(getattr(args, "out", None))


def cmd_scan(args) -> int:
    result = ifm.scan(args.lam, args.phi_l, ifm.phase_grid(args.grid))
    rows = zip(result.phi_r, result.intensity, result.analytic)
    meta = _meta(args, **{"lambda": args.lam, "normalization": result.normalization})
    _emit(args, fileio.render(meta, ["phi_r", "intensity", "analytic_intensity"], rows, args.format))
    return EXIT_OK


def cmd_curves(args) -> int:
    grid = ifm.phase_grid(args.grid)
    rows = []
    for lam in CURVE_LAMBDAS:
        result = ifm.scan(lam, args.phi_l, grid)
        rows.extend(zip(result.phi_r, result.intensity, result.analytic, [lam] * len(grid)))
    meta = _meta(args, lambdas=list(CURVE_LAMBDAS))
    columns = ["phi_r", "intensity", "analytic_intensity", "lambda"]
    _emit(args, fileio.render(meta, columns, rows, args.format))
    return EXIT_OK


def cmd_noise(args) -> int:
    noise = robustness.NoiseSpec(args.rel_amp, args.dist, args.samples, args.seed)
    grid = ifm.phase_grid(args.grid)
    stats = {lam: robustness.ensemble_scan(lam, args.phi_l, grid, noise) for lam in CURVE_LAMBDAS}
    verdicts = []
    for a, b in NOISE_PAIRS:
        rep = robustness.separation_report(stats[a], stats[b])
        verdicts.append({"lambdas": [a, b], "gap": rep.gap, "distinguishable": rep.distinguishable})
    rows = []
    for lam, st in stats.items():
        clean = ifm.signal_many(lam, args.phi_l, grid)
        analytic = ifm.analytic_signal(lam, args.phi_l, grid)
        for k in range(grid.size):
            rows.append([grid[k], clean[k], analytic[k], lam, *st.percentiles[:, k]])
    meta = _meta(
        args,
        rel_amp=args.rel_amp,
        dist=args.dist,
        samples=args.samples,
        lambdas=list(CURVE_LAMBDAS),
        asymmetry_median={str(lam): float(np.median(st.asymmetry)) for lam, st in stats.items()},
        separation=verdicts,
    )
    columns = ["phi_r", "intensity", "analytic_intensity", "lambda"]
    columns += [f"p{p}" for p in robustness.PERCENTILES]
    _emit(args, fileio.render(meta, columns, rows, args.format))
    for v in verdicts:
        a, b = v["lambdas"]
        print(
            f"lambda {a} vs {b}: gap {v['gap']:+.4f} -> "
            f"{'distinguishable' if v['distinguishable'] else 'not distinguishable'}",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_estimate(args) -> int:
    try:
        meta, cols = fileio.read(args.input)
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc.strerror}", EXIT_IO) from None
    except fileio.TableParseError as exc:
        raise CliError(f"{args.input}: {exc}", EXIT_PARSE) from None
    for name in ("phi_r", "intensity"):
        if name not in cols:
            raise CliError(f"{args.input}: missing column {name!r}", EXIT_PARSE)
    if "lambda" in cols and np.unique(cols["lambda"]).size > 1:
        raise CliError(f"{args.input}: file holds several curves; estimate needs one", EXIT_PARSE)
    phi_l = float(meta.get("phi_l", args.phi_l)) if isinstance(meta, dict) else args.phi_l
    result = ifm.ScanResult(phi_l, 0.0, cols["phi_r"], cols["intensity"], float("nan"))
    try:
        fit = ifm.fit_lambda(result)
    except (FitFailureError, InvalidArgumentError) as exc:
        raise CliError(f"fit failed: {exc}", EXIT_FIT) from None
    gamma = (5 + 4 * fit.lam**2) / 9
    report = {
        "lambda": fit.lam,
        "C": fit.C,
        "residual": fit.residual,
        "purity": gamma,
        "linear_entropy": 1 - gamma,
    }
    for key, value in report.items():
        print(f"{key:<15} {value:.17g}")
    if args.out not in (None, "-"):
        _emit(args, fileio.render(_meta(args, input=str(args.input)), list(report), [report.values()], args.format))
    return EXIT_OK


def cmd_selftest(args) -> int:
    t0 = time.perf_counter()
    results = selftest.run_all()
    print(selftest.format_table(results))
    print(f"{len(results)} checks in {time.perf_counter() - t0:.2f} s")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("FAILED: " + ", ".join(failed), file=sys.stderr)
        return EXIT_SELFTEST
    return EXIT_OK


COMMANDS = {
    "scan": cmd_scan,
    "curves": cmd_curves,
    "noise": cmd_noise,
    "estimate": cmd_estimate,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--phi-l", type=parse_angle, default=math.pi / 2,
                        help="left-arm phase in radians; accepts pi/2 style (default pi/2)")
    common.add_argument("--grid", type=int, default=512, help="number of phi_r points on [0, 2pi]")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = _Parser(
        prog="twinatom",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("scan", parents=[common], help="coincidence rate versus phi_r")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="coherence in [0, 1]")

    sub.add_parser("curves", parents=[common], help="scans for lambda = 0, 1/2, 1")

    p = sub.add_parser("noise", parents=[common], help="phase-noise ensembles and verdicts")
    p.add_argument("--rel-amp", type=float, default=0.15)
    p.add_argument("--dist", choices=("uniform", "gaussian"), default="uniform")
    p.add_argument("--samples", type=int, default=1000)

    p = sub.add_parser("estimate", parents=[common], help="fit lambda to a scan file")
    p.add_argument("input", help="scan output in CSV or JSON")

    sub.add_parser("selftest", parents=[common], help="run the invariant checks")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _validate(args)
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"twinatom {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

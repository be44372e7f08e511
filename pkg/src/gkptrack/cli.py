"""Command line front end.

Subcommands::

    gkptrack run        run a Monte Carlo sweep, write results.csv + manifest.json
    gkptrack threshold  locate the level-curve crossing from a results CSV
    gkptrack resources  print/write the qubit-budget table
    gkptrack plot       render a results CSV as a self-contained SVG

Exit codes: 0 success, 1 usage error, 2 runtime/IO error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import harness, resources, svgplot
from .kernels import get_backend

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        raise _UsageError(message)


def _parse_sigma_grid(text: str) -> tuple[float, ...]:
    """Inclusive A:B:STEP grid; points generated by index to avoid drift."""
    try:
        a_s, b_s, step_s = text.split(":")
        a, b, step = float(a_s), float(b_s), float(step_s)
    except ValueError:
        raise _UsageError(f"--sigma-total expects A:B:STEP, got {text!r}")
    if step <= 0:
        raise _UsageError("--sigma-total STEP must be > 0")
    if b < a:
        raise _UsageError("--sigma-total requires B >= A")
    count = int((b - a) / step + 1e-9) + 1
    return tuple(a + i * step for i in range(count))


def _parse_levels(text: str) -> tuple[int, ...]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            levels = tuple(range(int(lo), int(hi) + 1))
        else:
            levels = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise _UsageError(f"--levels expects e.g. '1,2,3' or '1..5', got {text!r}")
    if not levels or any(l < 1 for l in levels):
        raise _UsageError("--levels must all be >= 1")
    return levels


def _build_parser() -> _Parser:
    parser = _Parser(prog="gkptrack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo sweep")
    run.add_argument("--protocol", required=True, choices=["conventional", "tracking"])
    run.add_argument("--analog", required=True, choices=["on", "off"])
    run.add_argument("--cycles", required=True, type=int)
    run.add_argument("--levels", required=True, type=_parse_levels)
    run.add_argument("--sigma-total", required=True, type=_parse_sigma_grid,
                     help="inclusive grid A:B:STEP on the summed-noise axis")
    run.add_argument("--trials", required=True, type=int)
    run.add_argument("--seed", required=True, type=int)
    run.add_argument("--out", default=None,
                     help="output directory (default: $GKPTRACK_OUT or '.')")
    run.add_argument("--quadrature", choices=["q", "p", "both"], default="q")
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--max-failures-stop", type=int, default=None)
    run.add_argument("--kernel", choices=["pure", "compiled"], default=None)

    thr = sub.add_parser("threshold", help="locate the level-curve crossing")
    thr.add_argument("--in", dest="infile", required=True)
    thr.add_argument("--out", dest="outfile", required=True)

    res = sub.add_parser("resources", help="qubit-budget table")
    res.add_argument("--cycles", required=True, type=int)
    res.add_argument("--levels", required=True, type=_parse_levels)
    res.add_argument("--out", default=None, help="directory for resources.csv/.json")

    plot = sub.add_parser("plot", help="render results as SVG")
    plot.add_argument("--in", dest="infile", required=True)
    plot.add_argument("--out", dest="outfile", required=True)
    plot.add_argument("--threshold", default=None, help="threshold report JSON to mark")
    plot.add_argument("--title", default="")

    return parser


def _cmd_run(args) -> int:
    if args.cycles < 1 or (args.protocol == "tracking" and args.cycles < 2):
        raise _UsageError(f"--cycles invalid for protocol {args.protocol}: {args.cycles}")
    if args.trials < 1:
        raise _UsageError("--trials must be >= 1")
    out_dir = args.out or os.environ.get("GKPTRACK_OUT", ".")
    os.makedirs(out_dir, exist_ok=True)
    cfg = harness.SweepConfig(
        protocol=args.protocol,
        analog=args.analog == "on",
        cycles=args.cycles,
        sigma_total_grid=args.sigma_total,
        levels=args.levels,
        trials_per_point=args.trials,
        master_seed=args.seed,
        max_failures_stop=args.max_failures_stop,
        quadrature=args.quadrature,
    )
    backend = get_backend(args.kernel)
    sink = harness.CsvSink(os.path.join(out_dir, "results.csv"))
    harness.write_manifest(os.path.join(out_dir, "manifest.json"), cfg, backend.name, args.workers)

    def progress(est):
        print(
            f"  level {est.level}  sigma {est.sigma_total:g}  p_fail {est.p_fail:.6g}"
            f"  [{est.ci_low:.3g}, {est.ci_high:.3g}]  ({est.failures}/{est.trials})"
        )

    print(f"sweep: {args.protocol}/{'analog' if cfg.analog else 'digital'}"
          f" cycles={cfg.cycles} backend={backend.name}")
    harness.sweep(cfg, sink, workers=args.workers, backend=backend, progress=progress)
    print(f"results: {sink.path}")
    return EXIT_OK


def _cmd_threshold(args) -> int:
    estimates = harness.read_results(args.infile)
    report = harness.find_threshold(estimates)
    with open(args.outfile, "w") as fh:
        fh.write(report.to_json() + "\n")
    print(f"sigma_star = {report.sigma_star:.4f} +- {report.spread:.4f} (spread over "
          f"{len(report.crossing_pairs)} level pair(s))")
    return EXIT_OK


def _cmd_resources(args) -> int:
    if args.cycles < 2:
        raise _UsageError("--cycles must be >= 2 (tracking needs at least two cycles)")
    reports = resources.table(args.cycles, args.levels)
    header = f"{'n':>3} {'l':>3} {'conventional':>14} {'tracking':>10} {'saved':>10} {'rate %':>7}"
    print(header)
    for r in reports:
        print(
            f"{r.cycles:>3} {r.level:>3} {r.r_conventional:>14} {r.r_tracking:>10}"
            f" {r.saved:>10} {r.rate_percent:>7}"
        )
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        resources.write_csv(os.path.join(args.out, "resources.csv"), reports)
        resources.write_json(os.path.join(args.out, "resources.json"), reports)
        print(f"written: {args.out}/resources.csv, {args.out}/resources.json")
    return EXIT_OK


def _cmd_plot(args) -> int:
    estimates = harness.read_results(args.infile)
    if not estimates:
        raise RuntimeError(f"{args.infile}: no data rows")
    threshold = None
    if args.threshold:
        import json

        with open(args.threshold) as fh:
            payload = json.load(fh)
        threshold = harness.ThresholdEstimate(
            sigma_star=payload["sigma_star"],
            crossing_pairs=tuple(
                harness.CrossingPair(c["level_a"], c["level_b"], c["sigma_cross"])
                for c in payload["crossings"]
            ),
            spread=payload["spread"],
        )
    svgplot.render_curves(estimates, args.outfile, threshold=threshold, title=args.title)
    print(f"plot: {args.outfile}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "threshold":
            return _cmd_threshold(args)
        if args.command == "resources":
            return _cmd_resources(args)
        if args.command == "plot":
            return _cmd_plot(args)
        raise RuntimeError(f"unhandled command {args.command}")
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except harness.NoCrossingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

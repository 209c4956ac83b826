"""
Command-line front end: ``charcycle analyze`` and ``charcycle suite``.
"""

import argparse
import logging
import sys

from .config import Caps, Tolerances, DEFAULT_SCHEDULE, DEFAULT_TRIALS
from .report import RunConfig, run, catalog_suite, render_text, write_report

__all__ = ["main", "build_parser"]

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def build_parser():
    parser = argparse.ArgumentParser(
        prog = "charcycle",
        description = "Characteristic cycles of nearby and vanishing cycles "
                      "of polynomial hypersurface singularities at the origin.")
    parser.add_argument("-v", "--verbose", action = "count", default = 0,
                        help = "More log output (repeat for debug messages)")
    parser.add_argument("--silently", action = "store_true",
                        help = "Do not print progress messages")
    sub = parser.add_subparsers(dest = "command", required = True)

    analyze = sub.add_parser("analyze", help = "Analyze one polynomial")
    analyze.add_argument("--poly", required = True, help = "Polynomial, e.g. 'x^3+y^3+z^3'")
    analyze.add_argument("--vars", required = True, help = "Comma separated variables")
    analyze.add_argument("--mode", required = True,
                         choices = ("real-nearby", "nearby", "complex-nearby", "vanishing"))
    analyze.add_argument("--seed", type = int, default = 0)
    analyze.add_argument("--trials", type = int, default = DEFAULT_TRIALS,
                         help = "Random hyperplanes for the section Milnor number")
    analyze.add_argument("--schedule", default = ",".join(DEFAULT_SCHEDULE),
                         help = "Comma separated decreasing values of a")
    analyze.add_argument("--radii", default = None,
                         help = "Comma separated radius per value of a")
    analyze.add_argument("--radius-scale", type = float, default = None)
    analyze.add_argument("--lagrange", choices = ("minors", "multiplier"), default = "minors")
    analyze.add_argument("--workers", type = int, default = None)
    analyze.add_argument("--residual-tol", type = float, default = None,
                         help = "Largest accepted relative residual of a critical point")
    analyze.add_argument("--cluster-tol", type = float, default = None,
                         help = "Relative distance below which critical points merge")
    analyze.add_argument("--hessian-tol", type = float, default = None,
                         help = "Relative size below which a Hessian eigenvalue is zero")
    analyze.add_argument("--json", default = None, metavar = "PATH",
                         help = "Write the JSON report here")

    suite = sub.add_parser("suite", help = "Run the bundled catalog")
    suite.add_argument("--seed", type = int, default = 0)
    suite.add_argument("--workers", type = int, default = None)
    suite.add_argument("--json", default = None, metavar = "PATH")
    return parser


def _configure_logging(verbose):
    level = LOG_LEVELS[min(verbose, len(LOG_LEVELS) - 1)]
    logging.basicConfig(level = level, format = LOG_FORMAT, stream = sys.stderr)


def main(argv = None):
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    silently = args.silently

    if args.command == "analyze":
        config = RunConfig(
            args.poly, args.vars, args.mode,
            seed = args.seed,
            trials = args.trials,
            schedule = args.schedule,
            radii = args.radii,
            radius_scale = args.radius_scale,
            lagrange = args.lagrange,
            tolerances = Tolerances().updated(residual = args.residual_tol,
                                              clustering = args.cluster_tol,
                                              hessian = args.hessian_tol),
            caps = Caps.from_env(),
            output = args.json,
            verbosity = args.verbose,
            workers = args.workers,
        )
        print(f"Running {args.poly} ({args.mode})...", end = " ") if not silently else None
        report = run(config)
    else:
        print(f"Running catalog suite (seed {args.seed})...", end = " ") if not silently else None
        report = catalog_suite(args.seed, workers = args.workers)
        if args.json:
            write_report(report, args.json)
    print("done!") if not silently else None
    print(render_text(report.to_dict()))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""
Main Entry Point for gfcodebook.

Command-line front end: build | analyze | verify | table | export.
Exit codes: 0 all checks passed, 1 verification or integrity failure,
2 usage or parameter error.
"""

import argparse
import logging
import sys
import warnings

import numpy as np

from gfcodebook.core.codebook_manager import EXTRA_SUITES, SUITES, CodebookManager, ExitCode, RunConfig
from gfcodebook.core.field import DEFAULT_BUDGET
from gfcodebook.core.optimization import configure_numba
from gfcodebook.utils.report import write_report
from gfcodebook.utils.tables import flatten
from gfcodebook.version import __version__


def setup_environment(verbose=False, quiet=False, workers=None):
    """Configure logging, numpy and the worker threads."""
    warnings.filterwarnings("ignore", category=UserWarning)
    np.seterr(invalid="ignore")

    level = logging.DEBUG if verbose else (logging.WARNING if quiet else logging.INFO)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    thread_count = configure_numba(workers)
    logger = logging.getLogger("gfcodebook")
    logger.debug(f"Initialized with {thread_count} worker threads" if thread_count else "Initialized")
    return logger


def _add_params(parser, construction=True):
    if construction:
        parser.add_argument("--construction", choices=("I", "II"), default="II", help="Codebook family")
    parser.add_argument("--p", type=int, default=3, help="Odd prime characteristic")
    parser.add_argument("--t", type=int, default=1, help="r = p^t")
    parser.add_argument("--s", type=int, default=1, help="q = r^s")


def build_parser():
    """Argument parser with one subcommand per workflow."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="Largest field order enumerated exhaustively")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json", help="Report format")
    common.add_argument("--out", default=None, help="Output path (stdout for reports when omitted)")
    common.add_argument("--precision", type=int, default=4, help="Decimal places in reports")
    common.add_argument("--workers", type=int, default=None, help="Worker threads")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings only")

    parser = argparse.ArgumentParser(
        prog="gfcodebook",
        description="Near-optimal codebooks from finite field towers",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", parents=[common], help="Build a codebook and write a codebook file")
    _add_params(build)
    build.add_argument("--form", choices=("exponent", "complex"), default="exponent", help="Body form")

    analyze = sub.add_parser("analyze", parents=[common], help="I_max, Welch bound and ratio")
    _add_params(analyze)

    verify = sub.add_parser("verify", parents=[common], help="Run identity verification suites")
    _add_params(verify, construction=False)
    verify.add_argument("--suite", default="all", choices=("all",) + SUITES + EXTRA_SUITES,
                        help="Suite to run")

    table = sub.add_parser("table", parents=[common], help="Regenerate a published parameter table")
    table.add_argument("--section", type=int, choices=(2, 3), required=True,
                       help="2 for Construction I, 3 for Construction II")
    table.add_argument("--rows", type=int, nargs="*", default=None, help="1-based row numbers")

    export = sub.add_parser("export", parents=[common], help="Check a codebook file and rewrite it")
    export.add_argument("source", help="Codebook file to read")
    export.add_argument("--form", choices=("exponent", "complex"), default="exponent", help="Body form")
    return parser


def _config(args):
    config = RunConfig(
        construction=getattr(args, "construction", "II"),
        p=getattr(args, "p", 3),
        t=getattr(args, "t", 1),
        s=getattr(args, "s", 1),
        budget=args.budget,
        fmt=args.fmt,
        out=args.out,
        precision=args.precision,
        form=getattr(args, "form", "exponent"),
    )
    if args.workers:
        config.workers = args.workers
    return config


def run(argv=None):
    """Parse arguments, run one workflow and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0) and int(ExitCode.USAGE)
    logger = setup_environment(args.verbose, args.quiet, args.workers)
    config = _config(args)
    manager = CodebookManager()

    if args.command == "build":
        success, message, _ = manager.build(config)
    elif args.command == "export":
        success, message, _ = manager.export(args.source, config)
    elif args.command == "analyze":
        success, message, report = manager.analyze(config)
        if success:
            write_report(report.to_dict(), config.fmt, config.out, config.precision)
    elif args.command == "verify":
        success, message, result = manager.verify(config, args.suite)
        if result is not None:
            rows = result if config.fmt == "json" else [
                dict(suite=name, passed=r["passed"], checked=r["checked"]) for name, r in result["suites"].items()
            ] + [dict(suite=name, passed=None, checked=0, skipped=reason)
                 for name, reason in result["skipped"].items()]
            write_report(rows, config.fmt, config.out, config.precision)
    else:
        success, message, results = manager.table(args.section, args.rows, config)
        if success:
            rows = results if config.fmt == "json" else [flatten(r) for r in results]
            write_report(rows, config.fmt, config.out, config.precision)

    (logger.info if success else logger.error)(message)
    return int(manager.exit_code)


def main():
    """Main entry point for the application."""
    sys.exit(run())


if __name__ == "__main__":
    main()

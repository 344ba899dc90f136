"""Command-line entry point: ``python -m magfib <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence, Tuple

from pydantic import ValidationError

from .commands import execute, record_ok, render
from .config import configure_logging, get_settings
from .exceptions import EnumerationLimitError, InputError, MagfibError
from .schemas import CommandRequest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

COMMANDS = {
    "validate": "check the metric axioms of a space",
    "mh": "magnitude homology over every achievable length up to --lmax",
    "fibcheck": "verify a metric fibration and its fiber isometries",
    "kunneth": "verify MC(E) ≃ MC(E)/D(E) ≅ ⊕ MC(F) ⊗ MC(B) on homology",
    "morse": "validate the hv-matching on D-complexes and reduce them",
    "deltaiso": "check the cellwise bijection m(E)/D(E) ≅ m(F×B)/D(F×B)",
    "cau": "compare causal order complexes against magnitude homology",
}


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="magfib", description="Magnitude homology of finite metric spaces and metric fibrations.")
    parser.add_argument("--log-level", default=None, help="override MAGFIB_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in COMMANDS.items():
        cmd = sub.add_parser(name, help=help_text)
        source = cmd.add_argument_group("input")
        source.add_argument("--fixture", help="built-in dataset, e.g. paper-E2, K3, I2")
        source.add_argument("--space", help="space file (graph or matrix document)")
        source.add_argument("--fibration", help="fibration file with total, base and projection")
        source.add_argument("--total", help="total space file")
        source.add_argument("--base", help="base space file")
        source.add_argument("--proj", help="projection file mapping total labels to base labels")
        cmd.add_argument("--lmax", default="2", help="largest length, as an integer or p/q")
        cmd.add_argument("--nmax", type=int, default=None, help="largest degree to report")
        cmd.add_argument("--basepoint", default=None, help="base point label used for the fiber")
        cmd.add_argument("--format", choices=("table", "structured"), default=settings.output_format)
        cmd.add_argument("--jobs", type=int, default=settings.jobs)
        if name == "kunneth":
            cmd.add_argument("--all-basepoints", action="store_true", help="repeat the check for every base point")
        if name == "cau":
            cmd.add_argument("--refine", type=int, default=1, help="subdivide the time grid into steps of 1/N")
    return parser


def request_from_args(args: argparse.Namespace) -> CommandRequest:
    return CommandRequest(
        command=args.command,
        fixture=args.fixture,
        space=args.space,
        fibration=args.fibration,
        total=args.total,
        base=args.base,
        proj=args.proj,
        l_max=args.lmax,
        n_max=args.nmax,
        basepoint=args.basepoint,
        format=args.format,
        jobs=args.jobs,
        refine=getattr(args, "refine", 1),
        all_basepoints=getattr(args, "all_basepoints", False),
    )


def run_command(request: CommandRequest) -> Tuple[int, str]:
    """Exit code and the text to print on stdout."""
    try:
        record = execute(request)
    except (InputError, ValidationError, json.JSONDecodeError, OSError) as exc:
        return EXIT_INPUT, f"error: {exc}"
    except EnumerationLimitError as exc:
        logger.warning("%s stopped by the cell guard: %s", request.command, exc)
        return EXIT_INPUT, f"error: {exc}; raise MAGFIB_MAX_CELLS or lower --lmax"
    except MagfibError as exc:
        logger.warning("%s failed: %s", request.command, exc)
        return EXIT_FAILED, f"failed: {exc}"
    return (EXIT_OK if record_ok(record) else EXIT_FAILED), render(record, request.format)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    configure_logging(args.log_level)
    try:
        request = request_from_args(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code, output = run_command(request)
    stream = sys.stdout if code != EXIT_INPUT else sys.stderr
    print(output, file=stream)
    return code


def console_entry(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))

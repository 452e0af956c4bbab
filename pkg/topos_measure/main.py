#!/usr/bin/env python3
"""
Command line interface: one subcommand per verification
"""

import argparse
import sys
from typing import Any, Dict, List, Optional

from rich.console import Console

from . import __version__
from .config import DEFAULT_T_GRID, SEED_ENV, load_config, settings_from_args
from .exceptions import (
    ConfigError, MeasureError, OperatorError, ToposMeasureError, UsageError, ValidationError,
)
from .model import build_model
from .serialization import dump_report
from .verification import COMMANDS, VerificationRunner, exit_code, render_text

console = Console(stderr=True)

# argparse dests forwarded to the command handlers
OPTION_KEYS = ("measure", "mu", "nu", "obj", "maps", "u", "v", "operator", "samples", "strict")

HELP = {
    "validate": "Validate a model file",
    "orbits": "Orbits, stabilizers, internal cardinals and fiber profiles",
    "measure-check": "Check the invariant-measure axioms for a global measure",
    "change-of-vars": "Check the change-of-variables formula along a map",
    "extend": "Extend a measure from covers and compare the covers",
    "glue": "Descend a section of the modular bundle along an epimorphism",
    "chi": "Sections of the modular bundle versus measures on the slice",
    "rn": "Radon-Nikodym derivative of two valuations",
    "modular-flow": "Modular flow against its matrix-exponential oracle",
    "kms": "KMS boundary identities for two operators",
    "trace": "Trace property for a component-constant density",
    "state": "State of a measure and the measure of that state",
}


class _ArgumentParser(argparse.ArgumentParser):
    """Argument errors in the console style; exit status 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        console.print(f"[red]Usage error: {message}[/red]")
        sys.exit(2)


def _join_grid(argv: List[str]) -> List[str]:
    """``--t-grid -2:2:0.5`` → ``--t-grid=-2:2:0.5`` so a negative start is not read as a flag."""
    joined: List[str] = []
    it = iter(argv)
    for arg in it:
        if arg == "--t-grid":
            value = next(it, None)
            joined.append(arg if value is None else f"--t-grid={value}")
        else:
            joined.append(arg)
    return joined


def _common(parser: argparse.ArgumentParser, modular: bool = False) -> None:
    parser.add_argument("config", help="Model file (.json, .yaml or .yml)", metavar="CONFIG")
    parser.add_argument("--seed", type=int, help=f"Seed for sampled checks (default: ${SEED_ENV} or 0)")
    parser.add_argument("--tolerance", type=float, help="Relative tolerance (default: 1e-9)")
    if modular:
        parser.add_argument("--t-grid", dest="t_grid", help=f"Modular parameters a:b:step (default: {DEFAULT_T_GRID})",
                            metavar="A:B:STEP")
    output = parser.add_mutually_exclusive_group()
    output.add_argument("--json", dest="output", action="store_const", const="json", help="JSON report (default)")
    output.add_argument("--text", dest="output", action="store_const", const="text", help="Table report")
    parser.add_argument("--debug", action="store_true", help="Print tracebacks for unexpected errors")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="topos-measure",
        description="topos-measure - Invariant measures and modular flow on finite groupoid actions",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  topos-measure validate model.json                   Validate a model file
  topos-measure orbits model.json --object X          Orbits and stabilizers of X
  topos-measure measure-check model.json --measure mu Check the axioms for mu
  topos-measure change-of-vars model.json --measure mu --map f
  topos-measure extend model.json --measure mu --object X --map f --map g
  topos-measure rn model.json --mu mu --nu nu --object X
  topos-measure kms model.json --u u --v v --t-grid -2:2:0.5
  topos-measure trace model.json --measure lam --text

Every command prints a JSON report and exits 1 when a check fails.
        """
    )
    parser.add_argument("--version", action="version", version=f"topos-measure {__version__}")
    subparsers = parser.add_subparsers(dest='command', help='Available commands')
    parsers = {name: subparsers.add_parser(name, help=HELP[name]) for name in COMMANDS}
    for name, sub in parsers.items():
        _common(sub, modular=name in ("modular-flow", "kms", "trace"))

    parsers["orbits"].add_argument("--object", dest="obj", help="Restrict to one action", metavar="ACTION")

    for name in ("measure-check", "change-of-vars", "extend", "glue", "chi", "modular-flow", "kms", "trace", "state"):
        parsers[name].add_argument("--measure", help="Measure name from the model", metavar="NAME")
    for name in ("extend", "chi", "modular-flow", "trace", "state", "rn"):
        parsers[name].add_argument("--object", dest="obj", help="Action name", metavar="ACTION")
    for name in ("change-of-vars", "extend", "glue"):
        parsers[name].add_argument("--map", dest="maps", action="append", help="Map name (repeatable for extend)",
                                   metavar="NAME")
    for name in ("change-of-vars", "trace", "state"):
        parsers[name].add_argument("--samples", type=int, default=4, help="Random samples (default: 4)")

    parsers["rn"].add_argument("--mu", help="Numerator valuation", metavar="NAME")
    parsers["rn"].add_argument("--nu", help="Denominator valuation", metavar="NAME")
    parsers["modular-flow"].add_argument("--operator", help="Operator name or file", metavar="OP")
    parsers["kms"].add_argument("--u", help="First operator (name or file)", metavar="OP")
    parsers["kms"].add_argument("--v", help="Second operator (name or file)", metavar="OP")
    parsers["trace"].add_argument("--strict", action="store_true",
                                  help="Fail with an error when the density is not component-constant")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and print its report; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(_join_grid(list(sys.argv[1:] if argv is None else argv)))

    if not args.command:
        parser.print_help()
        return 0

    debug = args.debug
    try:
        settings = settings_from_args(
            seed=args.seed, tolerance=args.tolerance, t_grid=getattr(args, 't_grid', None),
            output=args.output, debug=args.debug,
        )
        model = build_model(load_config(args.config))
        options: Dict[str, Any] = {k: getattr(args, k) for k in OPTION_KEYS if hasattr(args, k)}
        report = VerificationRunner(model, settings, args.config).run(args.command, options)
    except UsageError as e:
        console.print(f"[red]Usage error: {e}[/red]")
        return 2
    except ConfigError as e:
        console.print(f"[red]Configuration error: {e}[/red]")
        return 1
    except ValidationError as e:
        console.print(f"[red]Validation error: {e}[/red]")
        return 1
    except (MeasureError, OperatorError) as e:
        console.print(f"[red]{type(e).__name__}: {e}[/red]")
        return 1
    except ToposMeasureError as e:
        console.print(f"[red]Error: {e}[/red]")
        return 1
    except KeyboardInterrupt:
        console.print("\n[yellow]Operation cancelled[/yellow]")
        return 130  # Standard exit code for SIGINT
    except Exception as e:
        console.print(f"[red]Unexpected error: {e}[/red]")
        if debug:
            console.print_exception()
        return 1

    if settings.output == 'text':
        render_text(report)
    else:
        sys.stdout.write(dump_report(report) + "\n")
    return exit_code(report)


def main():
    """Main entry point"""
    sys.exit(run())


if __name__ == "__main__":
    main()

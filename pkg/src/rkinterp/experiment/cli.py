"""Command-line entry point.

    rkinterp <command> --config <path> [--seed U64] [--out DIR] [--format json|csv] [--dry-run]

Exit codes: 0 success, 2 configuration error, 3 numerical degeneracy,
4 calibration failure, 5 I/O failure.
"""

import argparse
import json
import sys

from ..errors import (CalibrationError, ConfigurationError, DegenerateConfigurationError, ReportIOError,
                      RKInterpError, SingularityError)
from .config import COMMANDS, FORMATS, load_config, resolve
from .report import emit_report
from .runners import run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
EXIT_CALIBRATION = 4
EXIT_IO = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rkinterp",
                                     description="Reproducing-kernel frame, Gram and interpolation experiments.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed (unsigned 64-bit)")
    parser.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    parser.add_argument("--format", choices=FORMATS, default=None, help="report format (overrides output.format)")
    parser.add_argument("--dry-run", action="store_true", help="validate and print the resolved config, then exit")
    return parser


def _resolved(args):
    cfg = load_config(args.config)
    if cfg.command != args.command:
        raise ConfigurationError(f"config is for '{cfg.command}' but the command line asks for '{args.command}'")
    raw = cfg.to_dict()
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw["output"]["dir"] = args.out
    if args.format is not None:
        raw["output"]["format"] = args.format
    return resolve(raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolved(args)
        print(json.dumps(cfg.to_dict(), sort_keys=True, indent=2), flush=True)
        if args.dry_run:
            return EXIT_OK
        report = run(cfg)
        paths = emit_report(report, cfg.output["dir"], cfg.output["format"])
        for w in report.warnings:
            print(f"warning: {w}", file=sys.stderr)
        for path in paths:
            print(f"wrote {path}")
        return EXIT_OK
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateConfigurationError, SingularityError) as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except CalibrationError as exc:
        print(f"calibration failure: {exc}", file=sys.stderr)
        for step in exc.trace:
            print(f"  angular_density={step['angular_density']:.6g} density={step['density']:.6g}", file=sys.stderr)
        return EXIT_CALIBRATION
    except ReportIOError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RKInterpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return getattr(exc, "exit_code", 1)


if __name__ == "__main__":
    sys.exit(main())

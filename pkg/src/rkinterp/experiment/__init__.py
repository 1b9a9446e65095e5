"""Configs, runners, reports and the command-line interface."""

from .config import COMMANDS, ExperimentConfig, load_config, resolve
from .report import ExperimentReport, Table, emit_report, report_json, validate_document
from .runners import calibrate_lattice, run, run_babenko, trend_verdict

__all__ = [
    "COMMANDS",
    "ExperimentConfig",
    "ExperimentReport",
    "Table",
    "calibrate_lattice",
    "emit_report",
    "load_config",
    "report_json",
    "resolve",
    "run",
    "run_babenko",
    "trend_verdict",
    "validate_document",
]

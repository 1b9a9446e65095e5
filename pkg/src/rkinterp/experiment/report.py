"""Report assembly, serialization and emission.

JSON reports are single documents with sorted keys in which every
computed real is a decimal string with 17 significant digits (exact
round trip for binary64) and every complex value is the string "re,im".
The echoed config keeps plain JSON numbers so that it can be fed back to
the CLI unchanged.  Wall-clock timings go to a sidecar file, keeping the
report itself byte-identical across runs.
"""

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from ..errors import ReportIOError

SCHEMA_FILE = "report_schema.json"


def format_real(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def format_complex(z) -> str:
    z = complex(z)
    return f"{format_real(z.real)},{format_real(z.imag)}"


def encode(value):
    """Report cell encoding; ints, bools, strings and None pass through."""
    if value is None or isinstance(value, (bool, np.bool_)):
        return None if value is None else bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return format_real(value)
    if isinstance(value, (complex, np.complexfloating)):
        return format_complex(value)
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [encode(v) for v in value]
    raise TypeError(f"cannot encode {type(value).__name__} in a report")


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)

    def add(self, **cells):
        missing = set(self.columns) - set(cells)
        extra = set(cells) - set(self.columns)
        if missing or extra:
            raise ValueError(f"row for {self.name} has missing {sorted(missing)} / extra {sorted(extra)} cells")
        self.rows.append([cells[c] for c in self.columns])


@dataclass
class ExperimentReport:
    command: str
    config: dict
    tables: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def table(self, name: str) -> Table:
        for t in self.tables:
            if t.name == name:
                return t
        raise KeyError(name)

    def to_document(self) -> dict:
        from .. import __version__
        return {
            "command": self.command,
            "config": self.config,
            "metadata": encode(self.metadata),
            "tables": {t.name: {"columns": list(t.columns), "rows": encode(t.rows)} for t in self.tables},
            "tool": {"name": "rkinterp", "version": __version__},
            "warnings": list(self.warnings),
        }


def load_schema() -> dict:
    return json.loads(resources.files("rkinterp.experiment").joinpath(SCHEMA_FILE).read_text())


def validate_document(doc: dict):
    jsonschema.validate(doc, load_schema())


def report_json(report: ExperimentReport) -> str:
    doc = report.to_document()
    validate_document(doc)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def table_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in encode(table.rows):
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _atomic_write(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def emit_report(report: ExperimentReport, out_dir, fmt: str = "json") -> list:
    """Write the report (plus a timings sidecar) into ``out_dir``; returns the written paths.

    json: ``<command>.json``.  csv: ``<command>_<table>.csv`` per table and
    ``<command>_meta.json`` holding everything except the tables.  On any
    I/O failure the files written so far are removed.
    """
    if fmt not in ("json", "csv"):
        raise ValueError(f"unknown format {fmt!r}")
    out = Path(out_dir)
    files = []
    if fmt == "json":
        files.append((out / f"{report.command}.json", report_json(report)))
    else:
        meta = report.to_document()
        validate_document(meta)
        meta["tables"] = {t.name: {"columns": list(t.columns), "file": f"{report.command}_{t.name}.csv"}
                          for t in report.tables}
        files.append((out / f"{report.command}_meta.json", json.dumps(meta, sort_keys=True, indent=2) + "\n"))
        for t in report.tables:
            files.append((out / f"{report.command}_{t.name}.csv", table_csv(t)))
    timings = {k: round(float(v), 6) for k, v in report.timings.items()}
    files.append((out / f"{report.command}_timings.json", json.dumps(timings, sort_keys=True, indent=2) + "\n"))
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for path, text in files:
            _atomic_write(path, text)
            written.append(path)
    except OSError as exc:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        raise ReportIOError(f"cannot write report to {out}: {exc}") from exc
    return written

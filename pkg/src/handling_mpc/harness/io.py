"""Telemetry CSV and run-summary text output."""

from __future__ import annotations

import dataclasses
import io
from pathlib import Path
from typing import Iterable

from .runner import TELEMETRY_FIELDS, RunSummary, TelemetryRecord


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    return "%.9g" % value


def telemetry_csv(records: Iterable[TelemetryRecord]) -> str:
    """CSV text with a header row and 9 significant digits per float."""
    buf = io.StringIO()
    buf.write(",".join(TELEMETRY_FIELDS) + "\n")
    for rec in records:
        buf.write(",".join(_fmt(getattr(rec, name)) for name in TELEMETRY_FIELDS) + "\n")
    return buf.getvalue()


def read_telemetry_csv(path: str | Path) -> dict[str, list[float]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    cols: dict[str, list[float]] = {name: [] for name in header}
    for line in lines[1:]:
        for name, cell in zip(header, line.split(",")):
            cols[name].append(float(cell))
    return cols


def summary_text(summary: RunSummary) -> str:
    out = []
    for f in dataclasses.fields(summary):
        value = getattr(summary, f.name)
        if value is None:
            text = "none"
        elif isinstance(value, (str, bool, int)):
            text = str(value)
        else:
            text = "%.9g" % value
        out.append(f"{f.name} = {text}")
    return "\n".join(out) + "\n"


def write_run(out_dir: str | Path, stem: str, records: list[TelemetryRecord],
              summary: RunSummary) -> tuple[Path, Path]:
    """Write ``<stem>.csv`` and ``<stem>_summary.txt`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{stem}.csv"
    txt_path = out / f"{stem}_summary.txt"
    csv_path.write_text(telemetry_csv(records), encoding="utf-8")
    txt_path.write_text(summary_text(summary), encoding="utf-8")
    return csv_path, txt_path

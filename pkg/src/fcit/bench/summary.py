"""Records CSV to summary table: solve rates and medians with 99% intervals."""

from __future__ import annotations

import csv
import math
from pathlib import Path

from ..errors import ProblemParseError
from ..stats import SummaryRow, TrialRecord, summarize_records
from .runner import RECORD_COLUMNS, format_value

SUMMARY_COLUMNS = (
    "suite",
    "planner",
    "trials",
    "solved",
    "solve_frac",
    "solve_lo",
    "solve_hi",
    "t_init_med_ms",
    "t_init_lo_ms",
    "t_init_hi_ms",
    "c_init_med",
    "c_init_lo",
    "c_init_hi",
    "c_final_med",
    "c_final_lo",
    "c_final_hi",
    "median_ci_attained",
)


class RecordsParseError(ProblemParseError):
    """Malformed records CSV; the message names the row."""


_INT_FIELDS = {"trial", "seed", "edges_validated", "states_checked", "batches"}
_FLOAT_FIELDS = {"t_init_ms", "c_init", "t_final_ms", "c_final"}


def _parse_bool(text: str) -> bool:
    if text == "true":
        return True
    if text == "false":
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _parse_float(text: str) -> float:
    value = float(text)
    if math.isnan(value):
        raise ValueError("nan is not a valid time or cost")
    return value


def read_records(path: str | Path) -> list[TrialRecord]:
    """Parse a records CSV. Row numbers in errors count the header as row 1."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != RECORD_COLUMNS:
            raise RecordsParseError(f"{path}: row 1: header must be {','.join(RECORD_COLUMNS)}")
        records = []
        for rownum, row in enumerate(reader, start=2):
            if len(row) != len(RECORD_COLUMNS):
                raise RecordsParseError(f"{path}: row {rownum}: expected {len(RECORD_COLUMNS)} fields, got {len(row)}")
            values = {}
            for name, text in zip(RECORD_COLUMNS, row):
                try:
                    if name in _INT_FIELDS:
                        values[name] = int(text)
                    elif name in _FLOAT_FIELDS:
                        values[name] = _parse_float(text)
                    elif name == "solved":
                        values[name] = _parse_bool(text)
                    else:
                        values[name] = text
                except ValueError as exc:
                    raise RecordsParseError(f"{path}: row {rownum}: field {name}: {exc}") from None
            try:
                records.append(TrialRecord(**values))
            except ValueError as exc:
                raise RecordsParseError(f"{path}: row {rownum}: {exc}") from None
    return records


def summary_table_rows(rows: list[SummaryRow]) -> list[tuple]:
    out = []
    for r in rows:
        out.append(
            (
                r.suite,
                r.planner,
                r.trials,
                r.solved,
                r.solve_fraction.point,
                r.solve_fraction.lo,
                r.solve_fraction.hi,
                r.t_init_ms.point,
                r.t_init_ms.lo,
                r.t_init_ms.hi,
                r.c_init.point,
                r.c_init.lo,
                r.c_init.hi,
                r.c_final.point,
                r.c_final.lo,
                r.c_final.hi,
                r.median_coverage_attained,
            )
        )
    return out


def write_summary_csv(rows: list[SummaryRow], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for row in summary_table_rows(rows):
            w.writerow([format_value(v) for v in row])


def _fmt(x: float, digits: int) -> str:
    return "inf" if math.isinf(x) else f"{x:.{digits}f}"


def format_table(rows: list[SummaryRow]) -> str:
    header = f"{'suite':<16} {'planner':<11} {'solved %':>22} {'median t_init ms':>28} {'median c_init':>26} {'median c_final':>26}"
    lines = [header, "-" * len(header)]
    for r in rows:
        s = r.solve_fraction
        solved = f"{100 * s.point:.0f} [{100 * s.lo:.0f}, {100 * s.hi:.0f}]"
        t = f"{_fmt(r.t_init_ms.point, 1)} [{_fmt(r.t_init_ms.lo, 1)}, {_fmt(r.t_init_ms.hi, 1)}]"
        c0 = f"{_fmt(r.c_init.point, 4)} [{_fmt(r.c_init.lo, 4)}, {_fmt(r.c_init.hi, 4)}]"
        c1 = f"{_fmt(r.c_final.point, 4)} [{_fmt(r.c_final.lo, 4)}, {_fmt(r.c_final.hi, 4)}]"
        mark = "" if r.median_coverage_attained else " *"
        lines.append(f"{r.suite:<16} {r.planner:<11} {solved:>22} {t:>28} {c0:>26} {c1:>26}{mark}")
    if any(not r.median_coverage_attained for r in rows):
        lines.append("* too few trials for 99% median coverage; bounds are the sample extremes")
    return "\n".join(lines)


def summarize(records_path: str | Path, out_csv: str | Path | None = None, alpha: float = 0.01) -> tuple[list[SummaryRow], str]:
    rows = summarize_records(read_records(records_path), alpha)
    if out_csv is not None:
        write_summary_csv(rows, out_csv)
    return rows, format_table(rows)

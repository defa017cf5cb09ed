"""Published result tables as CSV fixtures, and checks of claims made about them."""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from collections import defaultdict
from dataclasses import dataclass, field
from importlib import resources

COLUMNS = ("table_id", "window_size", "digit", "base_snr", "overlap_pct", "frame_size", "snr_db", "accuracy_pct")
OVERLAPS = (20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0)
GROUP_KEY = ("table_id", "window_size", "digit")

PASS = "pass"
FAIL = "fail"
UNCHECKED = "unchecked"


class TableLoadError(ValueError):
    pass


@dataclass(frozen=True)
class TableRecord:
    """One (group, overlap) cell of a published table.

    ``frame_size`` is None where the published cell is missing.
    """

    table_id: int
    window_size: float
    digit: str | None
    base_snr: float | None
    overlap_pct: float
    frame_size: float | None
    snr_db: float
    accuracy_pct: float

    def group(self, by=GROUP_KEY) -> tuple:
        return tuple(getattr(self, f) for f in by)


@dataclass
class GroupResult:
    group: tuple
    verdict: str
    witness: dict = field(default_factory=dict)


@dataclass
class ClaimReport:
    claim_id: str
    groups: list[GroupResult]

    @property
    def groups_checked(self) -> int:
        return sum(1 for g in self.groups if g.verdict != UNCHECKED)

    @property
    def groups_passing(self) -> int:
        return sum(1 for g in self.groups if g.verdict == PASS)

    @property
    def passed(self) -> bool:
        return self.groups_passing == self.groups_checked

    def failures(self) -> list[GroupResult]:
        return [g for g in self.groups if g.verdict == FAIL]

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "groups_checked": self.groups_checked,
            "groups_passing": self.groups_passing,
            "groups": [
                {"group": list(g.group), "verdict": g.verdict, "witness": g.witness} for g in self.groups
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def to_text(self) -> str:
        lines = [f"{self.claim_id}: {self.groups_passing}/{self.groups_checked} groups pass"]
        for g in self.groups:
            label = " ".join(f"{v:g}" if isinstance(v, float) else str(v) for v in g.group if v not in (None, ""))
            detail = ", ".join(f"{k}={_fmt(v)}" for k, v in g.witness.items())
            lines.append(f"  [{g.verdict}] {label}: {detail}")
        return "\n".join(lines)


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.4f}"
    if isinstance(v, (list, tuple)):
        return "[" + " ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _parse_float(value: str, column: str, row: int, optional: bool = False) -> float | None:
    value = value.strip()
    if value == "" and optional:
        return None
    try:
        out = float(value)
    except ValueError:
        raise TableLoadError(f"row {row}: column {column} is not numeric: {value!r}") from None
    if not math.isfinite(out):
        raise TableLoadError(f"row {row}: column {column} must be finite, got {value!r}")
    return out


def read_table_csv(text: str) -> list[TableRecord]:
    """Parse fixture CSV text. Row numbers in errors count the header as row 1."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise TableLoadError("empty table file")
    missing = [c for c in COLUMNS if c not in reader.fieldnames]
    if missing:
        raise TableLoadError(f"missing column(s): {', '.join(missing)}")
    records, seen = [], {}
    for row_no, row in enumerate(reader, start=2):
        if None in row.values():
            raise TableLoadError(f"row {row_no}: too few cells")
        table_id = _parse_float(row["table_id"], "table_id", row_no)
        if table_id not in (1, 2, 3, 4, 5):
            raise TableLoadError(f"row {row_no}: table_id must be 1-5, got {row['table_id']}")
        overlap = _parse_float(row["overlap_pct"], "overlap_pct", row_no)
        if overlap not in OVERLAPS:
            raise TableLoadError(f"row {row_no}: overlap_pct {row['overlap_pct']} is not a published overlap")
        accuracy = _parse_float(row["accuracy_pct"], "accuracy_pct", row_no)
        if not 0 <= accuracy <= 100:
            raise TableLoadError(f"row {row_no}: accuracy_pct {accuracy} outside [0, 100]")
        rec = TableRecord(
            table_id=int(table_id),
            window_size=_parse_float(row["window_size"], "window_size", row_no),
            digit=row["digit"].strip() or None,
            base_snr=_parse_float(row["base_snr"], "base_snr", row_no, optional=True),
            overlap_pct=overlap,
            frame_size=_parse_float(row["frame_size"], "frame_size", row_no, optional=True),
            snr_db=_parse_float(row["snr_db"], "snr_db", row_no),
            accuracy_pct=accuracy,
        )
        key = rec.group() + (rec.overlap_pct,)
        if key in seen:
            raise TableLoadError(f"row {row_no}: duplicate cell {key}, first seen on row {seen[key]}")
        seen[key] = row_no
        records.append(rec)
    if not records:
        raise TableLoadError("table file has no data rows")
    return records


def load_table_csv(path) -> list[TableRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        return read_table_csv(fh.read())


def bundled_table(table_id: int) -> list[TableRecord]:
    """Records of published table ``table_id`` (1-5)."""
    text = resources.files(__package__).joinpath(f"data/table{table_id}.csv").read_text(encoding="utf-8")
    return read_table_csv(text)


def bundled_table_path(table_id: int):
    return resources.files(__package__).joinpath(f"data/table{table_id}.csv")


def records_to_csv(records) -> str:
    def cell(v):
        if v is None:
            return ""
        return repr(v) if isinstance(v, float) else str(v)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in records:
        writer.writerow([cell(getattr(r, c)) for c in COLUMNS])
    return buf.getvalue()


DIGITS = ("Zero", "One", "Two", "Three", "Four", "Five", "Six", "Seven", "Eight", "Nine")


def _sort_key(group: tuple):
    def part(v):
        if v is None:
            return (0, 0, "")
        if isinstance(v, str):
            return (1, DIGITS.index(v) if v in DIGITS else len(DIGITS), v)
        return (1, v, "")

    return tuple(part(v) for v in group)


def group_records(records, by=GROUP_KEY) -> dict[tuple, list[TableRecord]]:
    groups = defaultdict(list)
    for r in records:
        groups[r.group(by)].append(r)
    return {k: sorted(groups[k], key=lambda r: r.overlap_pct) for k in sorted(groups, key=_sort_key)}


def _complete(rows) -> bool:
    return tuple(r.overlap_pct for r in rows) == OVERLAPS


def snr_peak_check(records, group_by=GROUP_KEY, peak: float = 50.0) -> ClaimReport:
    """SNR rises strictly over overlaps up to ``peak`` and falls strictly after it."""
    results = []
    for key, rows in group_records(records, group_by).items():
        if not _complete(rows):
            results.append(GroupResult(key, UNCHECKED, {"overlaps": [r.overlap_pct for r in rows]}))
            continue
        snr = [r.snr_db for r in rows]
        split = OVERLAPS.index(peak)
        rising = all(b > a for a, b in zip(snr[: split + 1], snr[1 : split + 1]))
        falling = all(b < a for a, b in zip(snr[split:], snr[split + 1 :]))
        best = max(range(len(snr)), key=snr.__getitem__)
        results.append(GroupResult(key, PASS if rising and falling else FAIL, {
            "peak_overlap": OVERLAPS[best],
            "peak_snr": snr[best],
            "rising": rising,
            "falling": falling,
        }))
    return ClaimReport("snr-peak", results)


def accuracy_argmax_report(records, group_by=GROUP_KEY, band=(45.0, 55.0)) -> ClaimReport:
    """Whether each group's best-accuracy overlap lies inside ``band``.

    Ties go to the smallest overlap.
    """
    lo, hi = band
    results = []
    for key, rows in group_records(records, group_by).items():
        if not _complete(rows):
            results.append(GroupResult(key, UNCHECKED, {"overlaps": [r.overlap_pct for r in rows]}))
            continue
        best = max(rows, key=lambda r: (r.accuracy_pct, -r.overlap_pct))
        verdict = PASS if lo <= best.overlap_pct <= hi else FAIL
        results.append(GroupResult(key, verdict, {
            "argmax_overlap": best.overlap_pct,
            "max_accuracy": best.accuracy_pct,
        }))
    return ClaimReport("acc-argmax", results)


CHECKS = {"snr-peak": snr_peak_check, "acc-argmax": accuracy_argmax_report}


def summarize(records, group_by=GROUP_KEY) -> list[dict]:
    """Per-group min/max/mean of SNR and accuracy."""
    records = list(records)
    if not records:
        raise ValueError("summarize needs at least one record")
    out = []
    for key, rows in group_records(records, group_by).items():
        entry = {"group": key, "n": len(rows)}
        for col in ("snr_db", "accuracy_pct"):
            vals = [getattr(r, col) for r in rows]
            entry[col] = {"min": min(vals), "max": max(vals), "mean": statistics.fmean(vals)}
        out.append(entry)
    return out


def lint_records(records, group_by=GROUP_KEY) -> list[str]:
    """Warnings about suspicious published cells, which are kept as printed."""
    warnings = []
    groups = group_records(records, group_by)
    series = defaultdict(list)
    for key, rows in groups.items():
        label = " ".join(str(v) for v in key if v not in (None, ""))
        missing = [r.overlap_pct for r in rows if r.frame_size is None]
        if missing:
            warnings.append(f"{label}: frame size missing at overlap {', '.join(f'{o:g}' for o in missing)}")
        sizes = [(r.overlap_pct, r.frame_size) for r in rows if r.frame_size is not None]
        for (o1, f1), (o2, f2) in zip(sizes, sizes[1:]):
            if f2 < f1:
                warnings.append(f"{label}: frame size drops from {f1:.4f} at {o1:g}% to {f2:.4f} at {o2:g}%")
        series[tuple(r.snr_db for r in rows)].append(label)
    for labels in series.values():
        if len(labels) > 1:
            warnings.append(f"identical SNR series in groups: {'; '.join(labels)}")
    return warnings

"""Parameter grids and deterministic CSV / JSON reports."""

from __future__ import annotations

import csv
import dataclasses
import io
import itertools
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1
STATUSES = ("pass", "fail", "skip")


class GridError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class GridSpec:
    """Named axes of parameter values, kept as strings so rationals survive intact.

    Text form: ``"q=0.1,0.5; t=0.3:2.5:5; x=0.1:10:7:log"``.  ``lo:hi:n``
    gives n evenly spaced points, ``lo:hi:n:log`` n log-spaced points.
    """

    axes: tuple[tuple[str, tuple[str, ...]], ...] = ()

    @classmethod
    def parse(cls, text: str | None) -> "GridSpec":
        axes = []
        for chunk in (text or "").split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            name, sep, values = chunk.partition("=")
            name = name.strip()
            if not sep or not name:
                raise GridError(f"grid axis must look like name=values, got {chunk!r}")
            if name in dict(axes):
                raise GridError(f"grid axis {name!r} given twice")
            axes.append((name, _axis_values(values.strip())))
        return cls(tuple(axes))

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.axes]

    def points(self) -> list[dict[str, str]]:
        if not self.axes:
            return []
        names = self.names
        return [dict(zip(names, combo)) for combo in itertools.product(*(v for _, v in self.axes))]

    def __len__(self) -> int:
        return len(self.points())


def _axis_values(text: str) -> tuple[str, ...]:
    if not text:
        return ()
    if ":" in text and "," not in text:
        parts = text.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
            raise GridError(f"range must be lo:hi:n or lo:hi:n:log, got {text!r}")
        try:
            lo, hi, n = float(Fraction(parts[0])), float(Fraction(parts[1])), int(parts[2])
        except (ValueError, ZeroDivisionError) as exc:
            raise GridError(f"bad range {text!r}") from exc
        if n < 0:
            raise GridError("a range needs a non-negative point count")
        if len(parts) == 4:
            if lo <= 0 or hi <= 0:
                raise GridError("log ranges need positive endpoints")
            values = np.geomspace(lo, hi, n)
        else:
            values = np.linspace(lo, hi, n)
        return tuple(repr(float(v)) for v in values)
    return tuple(v.strip() for v in text.split(",") if v.strip())


@dataclasses.dataclass
class ReportDocument:
    version: str
    context: dict
    rows: list[dict] = dataclasses.field(default_factory=list)

    @property
    def summary(self) -> dict[str, int]:
        counts = {status: 0 for status in STATUSES}
        for row in self.rows:
            counts[row.get("status", "pass")] += 1
        return counts

    def to_json(self) -> str:
        doc = {"schema": SCHEMA_VERSION, "version": self.version, "context": self.context,
               "rows": self.rows, "summary": self.summary}
        return json.dumps(doc, indent=2, ensure_ascii=False, default=str) + "\n"

    def to_csv(self) -> str:
        return rows_to_csv(self.rows)

    def write(self, path: str | Path) -> None:
        path = Path(path)
        text = self.to_json() if path.suffix == ".json" else self.to_csv()
        path.write_text(text, encoding="utf-8", newline="")


def rows_to_csv(rows: list[dict], header: list[str] | None = None) -> str:
    """RFC 4180 CSV: header of every key in first-seen order, CRLF line ends."""
    columns = list(header or [])
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=columns, restval="", lineterminator="\r\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in row.items()})
    return out.getvalue()


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, default=str, sort_keys=True)
    return "" if value is None else str(value)

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Sequence

from .errors import UnsupportedError, ValidationError
from .utils import SIG_DIGITS, fmt_num

FORMATS = ("csv", "json", "svg")


@dataclass
class ResultTable:
    """
    Column names plus rows of values. The first column is the x axis of an SVG chart;
    every other numeric column becomes one series.
    """
    columns: List[str]
    rows: List[List[Any]] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.columns:
            raise ValidationError("ResultTable needs at least one column")
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ValidationError(
                    f"Row {i} has {len(row)} values, expected {len(self.columns)}"
                )

    @classmethod
    def from_records(
        cls, records: Sequence[Mapping[str, Any]], meta: Mapping[str, Any] | None = None
    ) -> "ResultTable":
        if not records:
            raise ValidationError("ResultTable.from_records needs at least one record")
        cols = list(records[0].keys())
        rows = [[r[c] for c in cols] for r in records]
        return cls(cols, rows, dict(meta or {}))

    def column(self, name: str) -> List[Any]:
        try:
            j = self.columns.index(name)
        except ValueError:
            raise ValidationError(f"Unknown column '{name}'") from None
        return [row[j] for row in self.rows]


def _json_value(x: Any) -> Any:
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return repr(x)
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(x, Mapping):
        return {str(k): _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def to_csv(table: ResultTable) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([fmt_num(v) for v in row])
    return buf.getvalue().encode("utf-8")


def to_json(table: ResultTable) -> bytes:
    from . import __version__

    meta = {"tool": "weylbound", "version": __version__}
    meta.update(table.meta)
    doc = {
        "columns": table.columns,
        "rows": [_json_value(list(r)) for r in table.rows],
        "meta": _json_value(meta),
    }
    return (json.dumps(doc, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def to_svg(table: ResultTable, log_y: bool = False) -> bytes:
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise UnsupportedError("SVG output needs matplotlib: pip install weylbound[plot]") from None

    x = [float(v) for v in table.column(table.columns[0])]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    try:
        for j, name in enumerate(table.columns[1:], start=1):
            ys = [row[j] for row in table.rows]
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in ys):
                continue
            (line,) = ax.plot(x, [float(v) for v in ys], label=name)
            line.set_gid(f"series-{name}")
        if log_y:
            ax.set_yscale("log")
        ax.set_xlabel(table.columns[0])
        title = table.meta.get("title")
        if title:
            ax.set_title(str(title))
        ax.legend(loc="best", fontsize="small")
        ax.grid(True, alpha=0.3)
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", bbox_inches="tight")
    finally:
        plt.close(fig)
    return buf.getvalue()


def emit(table: ResultTable, fmt: str = "csv", log_y: bool = False) -> bytes:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    if fmt == "svg":
        return to_svg(table, log_y=log_y)
    raise ValidationError(f"Output format expected one of {FORMATS}, got {fmt!r}")

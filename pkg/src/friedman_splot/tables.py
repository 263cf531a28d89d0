"""Reading and writing block designs as CSV (wide or long layout)."""

from __future__ import annotations

import csv
import io
import math
import sys
from importlib import resources
from pathlib import Path
from typing import TextIO

import numpy as np

from .errors import DataError, IncompleteDesignError
from .ranking import BlockDesign

FORMATS = ("wide", "long")
LONG_HEADER = ("block", "group", "value")


def _number(text: str, line: int, column: str) -> float:
    try:
        value = float(text.strip())
    except ValueError:
        raise DataError(f"could not parse {text!r} as a number", line, column) from None
    if not math.isfinite(value):
        raise DataError(f"non-finite value {text!r}", line, column)
    return value


def _rows(text: str) -> list[tuple[int, list[str]]]:
    reader = csv.reader(io.StringIO(text))
    out = []
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        out.append((reader.line_num, row))
    return out


def _parse_wide(text: str) -> BlockDesign:
    rows = _rows(text)
    if not rows:
        raise DataError("empty table")
    _, header = rows[0]
    header = [h.strip() for h in header]
    if len(header) < 3:
        raise DataError("wide table needs a block column and at least two group columns", rows[0][0])
    groups = header[1:]
    if len(set(groups)) != len(groups):
        dup = next(g for g in groups if groups.count(g) > 1)
        raise DataError(f"duplicate group column {dup!r}", rows[0][0])
    blocks, values = [], []
    for line, row in rows[1:]:
        if len(row) != len(header):
            raise DataError(f"expected {len(header)} fields, found {len(row)}", line)
        label = row[0].strip()
        if label in blocks:
            raise DataError(f"duplicate block {label!r}", line, header[0] or "block")
        blocks.append(label)
        values.append([_number(cell, line, col) for cell, col in zip(row[1:], groups)])
    if not values:
        raise DataError("table has a header but no blocks")
    return BlockDesign(np.array(values), tuple(blocks), tuple(groups))


def _parse_long(text: str) -> BlockDesign:
    rows = _rows(text)
    if not rows:
        raise DataError("empty table")
    line0, header = rows[0]
    if tuple(h.strip().lower() for h in header) != LONG_HEADER:
        raise DataError(f"long table header must be {','.join(LONG_HEADER)}", line0)
    blocks: list[str] = []
    groups: list[str] = []
    cells: dict[tuple[str, str], float] = {}
    for line, row in rows[1:]:
        if len(row) != 3:
            raise DataError(f"expected 3 fields, found {len(row)}", line)
        block, group = row[0].strip(), row[1].strip()
        value = _number(row[2], line, "value")
        if (block, group) in cells:
            raise DataError(f"duplicate cell for block {block!r}, group {group!r}", line)
        cells[(block, group)] = value
        if block not in blocks:
            blocks.append(block)
        if group not in groups:
            groups.append(group)
    if not cells:
        raise DataError("table has a header but no rows")
    missing = [(b, g) for b in blocks for g in groups if (b, g) not in cells]
    if missing:
        raise IncompleteDesignError(missing)
    values = np.array([[cells[(b, g)] for g in groups] for b in blocks])
    return BlockDesign(values, tuple(blocks), tuple(groups))


def parse_table(source: str | Path | TextIO, format: str = "wide") -> BlockDesign:
    """Read a design from a path, ``"-"`` (standard input) or an open text stream."""
    if format not in FORMATS:
        raise DataError(f"unknown table format {format!r}; expected wide or long")
    if hasattr(source, "read"):
        text = source.read()
    elif str(source) == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(source).read_text(encoding="utf-8-sig")
        except OSError as exc:
            raise DataError(f"cannot read {source}: {exc.strerror or exc}") from None
    return parse_text(text, format)


def parse_text(text: str, format: str = "wide") -> BlockDesign:
    return _parse_wide(text) if format == "wide" else _parse_long(text)


def _cell(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def emit_table(design: BlockDesign, format: str = "wide", block_header: str = "block") -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if format == "wide":
        writer.writerow([block_header, *design.group_labels])
        for label, row in zip(design.block_labels, design.values):
            writer.writerow([label, *(_cell(v) for v in row)])
    elif format == "long":
        writer.writerow(LONG_HEADER)
        for label, row in zip(design.block_labels, design.values):
            for group, v in zip(design.group_labels, row):
                writer.writerow([label, group, _cell(v)])
    else:
        raise DataError(f"unknown table format {format!r}; expected wide or long")
    return buf.getvalue()


def example_path(name: str = "questions") -> Path:
    """Path of a bundled example table (``questions``: questions asked per day, groups A-D)."""
    ref = resources.files("friedman_splot") / "data" / f"{name}.csv"
    return Path(str(ref))


def load_example(name: str = "questions") -> BlockDesign:
    return parse_table(example_path(name), "wide")

"""CSV ingestion and the bundled example dataset.

Input format: comma-separated, UTF-8, '.' decimal separator, one
mandatory header row (its names are not interpreted; column meaning is
positional). Three layouts are recognized by column count:

    time,value                      one series
    group,time,value                one series per group
    group,season,time,value         one series per (group, season)

An empty value cell marks a missing observation: in the one-series
layout the observation is dropped; in grouped layouts the whole group is
excluded from testing (and reported as excluded), since the aggregate
test wants complete coverage of the time grid.

The bundled fixture ``data/platelets_2001_2005.csv`` holds annual
platelet donations per 1000 inhabitants for 19 European countries over
2001-2005, a small complete panel that exercises the grouped test and
its threshold policies.
"""

from __future__ import annotations

import csv
import math
from importlib import resources

import numpy as np

from .core import Series
from .errors import InputError, NoUsableData
from .regional import RegionalDataset

FIXTURE_NAME = "data/platelets_2001_2005.csv"


def _parse_float(cell: str, what: str, line: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise InputError(f"line {line}: cannot parse {what} {cell!r}") from None


def _read_rows(lines) -> list[tuple[int, list[str]]]:
    """Non-empty CSV rows as (line_number, cells), header skipped."""
    rows = []
    for lineno, cells in enumerate(csv.reader(lines), start=1):
        cells = [c.strip() for c in cells]
        if not cells or all(c == "" for c in cells):
            continue
        rows.append((lineno, cells))
    if not rows:
        raise NoUsableData("input has no rows at all")
    head_line, head = rows[0]
    # the header is mandatory; a fully numeric first row means it is missing
    def _numeric(c):
        try:
            float(c)
            return True
        except ValueError:
            return False
    if all(_numeric(c) for c in head if c != ""):
        raise InputError(f"line {head_line}: header row required, got numbers")
    return rows[1:]


def read_input_table(lines) -> Series | RegionalDataset:
    """Parse CSV lines into a Series or RegionalDataset by column count.

    Args:
        lines: Iterable of text lines (an open file does fine).

    Raises:
        InputError: Malformed rows, with the offending line number.
        NoUsableData: No data rows, or nothing left after exclusions.
    """
    rows = _read_rows(lines)
    if not rows:
        raise NoUsableData("input has a header but no data rows")
    width = len(rows[0][1])
    if width not in (2, 3, 4):
        raise InputError(
            f"line {rows[0][0]}: expected 2, 3, or 4 columns, got {width}"
        )
    for lineno, cells in rows:
        if len(cells) != width:
            raise InputError(
                f"line {lineno}: expected {width} columns, got {len(cells)}"
            )

    if width == 2:
        times, values = [], []
        for lineno, (t, x) in rows:
            if x == "":
                continue  # missing observation, dropped
            times.append(_parse_float(t, "time", lineno))
            values.append(_parse_float(x, "value", lineno))
        if len(values) < 2:
            raise NoUsableData("fewer than 2 usable observations")
        order = np.argsort(times, kind="stable")
        times = np.asarray(times)[order]
        values = np.asarray(values)[order]
        if np.any(np.diff(times) == 0):
            dup = times[np.nonzero(np.diff(times) == 0)[0][0]]
            raise InputError(f"duplicate time {dup!r} in single-series input")
        return Series(times=times, values=values)

    labels, times, values = [], [], []
    for lineno, cells in rows:
        if width == 3:
            lab, t, x = cells
        else:
            g, season, t, x = cells
            lab = f"{g}/{season}"
        labels.append(lab)
        times.append(_parse_float(t, "time", lineno))
        # empty cell -> NaN -> the group is excluded by the dataset builder
        values.append(math.nan if x == "" else _parse_float(x, "value", lineno))
    return RegionalDataset.from_columns(labels, times, values)


def read_input_file(path) -> Series | RegionalDataset:
    """read_input_table on a file path."""
    try:
        with open(path, encoding="utf-8") as fh:
            return read_input_table(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e


def platelet_donations() -> RegionalDataset:
    """The bundled 19-country platelet-donation panel, 2001-2005."""
    ref = resources.files("lrdkendall").joinpath(FIXTURE_NAME)
    with ref.open("r", encoding="utf-8") as fh:
        data = read_input_table(fh)
    assert isinstance(data, RegionalDataset)
    return data

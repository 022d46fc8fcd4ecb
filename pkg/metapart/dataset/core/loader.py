"""
CSV ingestion and emission

Dialect: comma separated, optional header row (detected when every non-label cell of
the first row is non-numeric), blank lines ignored. Floats are written with 17
significant digits so that load_csv(write_csv(x)) == x.
"""
import csv
import io
import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from metapart.core.errors import InputError, ParseError, ReportIOError
from metapart.dataset.schemas import PointSet, ReferencePartition
from metapart.partition.schemas import Partition

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _to_float(cell: str) -> float:
    # float() rounds correctly; pandas' fast parser can be off by a few ulps
    try:
        return float(cell)
    except ValueError:
        return np.nan


def _column_names(d: int) -> List[str]:
    return ["x", "y"] if d == 2 else [f"x{j}" for j in range(d)]


def load_csv(path, label_column: Optional[int] = None) -> Tuple[PointSet, Optional[ReferencePartition]]:
    """
    Load a numeric dataset.

    Args:
        path: CSV file path
        label_column: column index holding cluster labels (any strings), or None

    Returns:
        (PointSet of every non-label column, ReferencePartition or None)
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"dataset file not found: {path}")
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}")
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        line = raw.count(b"\n", 0, e.start) + 1
        raise ParseError(line, f"byte {raw[e.start:e.start + 1]!r} is not valid UTF-8")

    rows: List[List[str]] = []
    line_numbers: List[int] = []
    reader = csv.reader(io.StringIO(text, newline=""), skipinitialspace=True)
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        rows.append([cell.strip() for cell in row])
        line_numbers.append(reader.line_num)

    if not rows:
        raise InputError(f"{path} is empty")

    ncols = len(rows[0])
    for row, line in zip(rows, line_numbers):
        if len(row) != ncols:
            raise ParseError(line, f"expected {ncols} fields, saw {len(row)}")

    if label_column is not None and not 0 <= label_column < ncols:
        raise InputError(f"label column {label_column} outside 0..{ncols - 1}")
    value_cols = [c for c in range(ncols) if c != label_column]
    if not value_cols:
        raise InputError("no numeric columns besides the label column")

    if not any(_is_number(rows[0][c]) for c in value_cols):
        logger.debug(f"Header detected in {path}: {rows[0]}")
        rows, line_numbers = rows[1:], line_numbers[1:]

    if len(rows) < 2:
        raise InputError(f"need at least 2 data rows, got {len(rows)}")

    frame = pd.DataFrame(rows, index=line_numbers)
    values = frame[value_cols].map(_to_float).to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        line = line_numbers[r]
        raise ParseError(line, f"column {value_cols[c]} is not a finite number: {rows[r][value_cols[c]]!r}")

    points = PointSet(points=values)
    reference = None
    if label_column is not None:
        reference = Partition.from_labels(frame[label_column].tolist())

    logger.info(
        f"Loaded {path.name}: n={points.n}, d={points.d}"
        + (f", reference s={reference.s}" if reference else "")
    )
    return points, reference


def write_csv(path, points: PointSet, reference: Optional[ReferencePartition] = None) -> Path:
    path = Path(path)
    df = pd.DataFrame(points.points, columns=_column_names(points.d))
    if reference is not None:
        if reference.n != points.n:
            raise InputError(f"reference covers {reference.n} points, dataset has {points.n}")
        df["label"] = reference.array
    try:
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise ReportIOError(f"cannot write {path}: {e}")
    return path

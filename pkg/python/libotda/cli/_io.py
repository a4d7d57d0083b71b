import json
import os
import pathlib
import tempfile
from typing import Optional, Union

import numpy as np
import pandas as pd

from libotda.core import DataMatrix, ValidationError

PathLike = Union[str, os.PathLike]


def _resolve_label_column(
    label_column: Union[str, int], columns: list, has_header: bool
) -> int:
    if isinstance(label_column, str):
        if has_header and label_column in columns:
            return columns.index(label_column)
        if not label_column.isdigit():
            raise ValidationError(f"label column {label_column!r} not found in header")
        label_column = int(label_column)
    if not 0 <= label_column < len(columns):
        raise ValidationError(
            f"label column index {label_column} out of range for "
            f"{len(columns)} columns"
        )
    return label_column


def _parse_labels(raw: pd.Series) -> np.ndarray:
    """Integer labels if every label is an integer, else strings"""
    numeric = pd.to_numeric(raw, errors="coerce")
    if not numeric.isna().any() and np.all(np.mod(numeric.to_numpy(), 1) == 0):
        return numeric.to_numpy().astype(np.int64)
    return raw.to_numpy().astype(str)


def load_csv(
    path: PathLike,
    has_header: bool = False,
    delimiter: str = ",",
    label_column: Optional[Union[str, int]] = None,
) -> DataMatrix:
    """Read a numeric table into a DataMatrix

    Parameters
    ----------
    path : path-like
        CSV file, UTF-8, decimal point ".", one instance per row.
    has_header : bool = False
        If True, the first line holds column names, kept as feature names.
    delimiter : str = ","
        Field separator.
    label_column : Optional[Union[str, int]] = None
        Column holding class labels, by header name or 0-based index. Labels that
        are all integers are parsed as integers, otherwise kept as strings.

    Returns
    -------
    data : DataMatrix
        The remaining columns as finite reals, with labels and feature names.

    Raises
    ------
    ValidationError
        For a missing file, an empty table, ragged rows, non-numeric or non-finite
        cells, undecodable bytes, or a missing label column. Blank lines are
        skipped. Data rows are counted from 1, excluding the header and blank
        lines; messages also name the line of the file.
    """
    path = pathlib.Path(path)
    if not path.is_file():
        raise ValidationError(f"{path}: no such file")
    try:
        frame = pd.read_csv(
            path,
            sep=delimiter,
            header=0 if has_header else None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        raise ValidationError(f"{path}: empty table")
    except pd.errors.ParserError as e:
        raise ValidationError(f"{path}: ragged rows: {e}")
    except UnicodeDecodeError as e:
        raise ValidationError(f"{path}: not valid UTF-8 ({e.reason} at byte {e.start})")
    except ValueError as e:
        raise ValidationError(f"{path}: unreadable table: {e}")

    # blank lines are kept as rows so that every row knows its line in the file
    line_offset = 1 if has_header else 0
    stripped = frame.fillna("").apply(lambda col: col.astype(str).str.strip())
    blank = (stripped == "").all(axis=1)
    lines = np.flatnonzero(~blank.to_numpy()) + 1 + line_offset
    frame = frame.loc[~blank].reset_index(drop=True)
    if frame.shape[0] == 0:
        raise ValidationError(f"{path}: table has no data rows")

    # short rows are padded with NaN, empty fields read as ""
    missing = frame.isna().to_numpy()
    if missing.any():
        row = int(np.flatnonzero(missing.any(axis=1))[0])
        raise ValidationError(
            f"{path}: ragged rows: row {row + 1} (line {lines[row]}) has "
            f"{frame.shape[1] - int(missing[row].sum())} fields, "
            f"expected {frame.shape[1]}"
        )

    columns = list(frame.columns)
    label_index = None
    if label_column is not None:
        label_index = _resolve_label_column(label_column, columns, has_header)
    feature_indices = [j for j in range(len(columns)) if j != label_index]
    if not feature_indices:
        raise ValidationError(f"{path}: no feature columns")

    values = np.empty((frame.shape[0], len(feature_indices)))
    for k, j in enumerate(feature_indices):
        raw = frame.iloc[:, j].str.strip()
        numeric = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=np.float64)
        bad = ~np.isfinite(numeric)
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise ValidationError(
                f"{path}: non-numeric cell {raw.iloc[row]!r} at row {row + 1} "
                f"(line {lines[row]}), column {j + 1}"
            )
        values[:, k] = numeric

    labels = None
    if label_index is not None:
        labels = _parse_labels(frame.iloc[:, label_index].str.strip())
    names = [str(columns[j]) for j in feature_indices] if has_header else None
    return DataMatrix(values, labels=labels, feature_names=names)


def atomic_write_text(path: PathLike, text: str) -> None:
    """Write `text` to a temporary file next to `path`, then rename it over `path`"""
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        pathlib.Path(tmp).unlink(missing_ok=True)
        raise


def write_json(path: PathLike, data: dict) -> None:
    atomic_write_text(path, json.dumps(data, indent=2) + "\n")


def write_frame_csv(path: PathLike, frame: pd.DataFrame, header: bool = True):
    """Write `frame` without its index; floats keep their round-trip repr"""
    text = frame.to_csv(
        index=False, header=header, float_format=None, lineterminator="\n"
    )
    atomic_write_text(path, text)


def write_data_csv(path: PathLike, data: DataMatrix, label_name: str = "label"):
    """Write `data` with its labels, if any, as the last column"""
    has_names = data.feature_names is not None
    frame = pd.DataFrame(
        data.values, columns=data.feature_names if has_names else None
    )
    if data.has_labels():
        frame.insert(
            frame.shape[1],
            label_name if has_names else frame.shape[1],
            data.labels,
            allow_duplicates=True,
        )
    write_frame_csv(path, frame, header=has_names)

"""Series file IO and result documents.

Series live in plain text: one record per line, fields split on a sniffed
delimiter (comma, semicolon, tab, or runs of whitespace).  A first line
whose fields do not all parse as numbers is taken as a header.  Values must
be finite; errors carry 1-based line numbers.

Results are JSON documents with stable key order, built from plain dicts so
they can be compared across runs; wall-clock timings live in a separate
"timing_s" block that callers may ignore when diffing.
"""

import json
import math

import numpy as np

from .errors import InputError, ParameterError


def _sniff_delimiter(line):
    for cand in (",", ";", "\t"):
        if cand in line:
            return cand
    return None


def _split(line, delim):
    if delim is None:
        return line.split()
    return [f.strip() for f in line.split(delim)]


def _try_floats(fields):
    out = []
    for f in fields:
        try:
            out.append(float(f))
        except ValueError:
            return None
    return out


def load_series(path, column=None):
    """Load one numeric column from a delimited text file.

    Parameters
    ----------
    path : str
    column : int, str, or None
        Column index (0-based) or header name.  None selects the only
        column, or column 0 of a headerless multi-column file; a
        multi-column file with a header requires an explicit choice.

    Returns
    -------
    (values, meta) : float64 ndarray and a dict with n, column, header,
    delimiter.

    Raises
    ------
    InputError
        Missing or unreadable file, no data, unknown column, ragged rows,
        unparseable or non-finite values; messages carry line numbers.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")

    lines = [(no + 1, line.strip()) for no, line in enumerate(raw.splitlines())]
    lines = [(no, line) for no, line in lines if line]
    if not lines:
        raise InputError(f"{path}: no data")

    first_no, first = lines[0]
    delim = _sniff_delimiter(first)
    head_fields = _split(first, delim)
    header = _try_floats(head_fields) is None
    names = head_fields if header else None
    width = len(head_fields)

    if isinstance(column, str) and column.isdigit():
        column = int(column)
    if column is None:
        if width == 1:
            col = 0
        elif not header:
            col = 0
        else:
            raise InputError(
                f"{path}: {width} columns ({', '.join(names)}); pick one with column="
            )
    elif isinstance(column, str):
        if not header:
            raise InputError(
                f"{path}: no header line, select the column by index instead of {column!r}"
            )
        if column not in names:
            raise InputError(
                f"{path}: no column named {column!r}; have {', '.join(names)}"
            )
        col = names.index(column)
    else:
        col = int(column)
        if not 0 <= col < width:
            raise InputError(f"{path}: column index {col} outside [0, {width})")

    data_lines = lines[1:] if header else lines
    if not data_lines:
        raise InputError(f"{path}: header only, no data rows")

    values = np.empty(len(data_lines), dtype=np.float64)
    for pos, (no, line) in enumerate(data_lines):
        fields = _split(line, delim)
        if len(fields) != width:
            raise InputError(
                f"{path}:{no}: expected {width} field(s), found {len(fields)}"
            )
        token = fields[col]
        try:
            value = float(token)
        except ValueError:
            raise InputError(f"{path}:{no}: cannot parse {token!r} as a number")
        if not math.isfinite(value):
            raise InputError(f"{path}:{no}: non-finite value {token!r}")
        values[pos] = value

    meta = {
        "n": int(values.size),
        "column": names[col] if header else col,
        "header": header,
        "delimiter": "whitespace" if delim is None else delim,
    }
    return values, meta


def write_series(path, values):
    """Write a series as one full-precision number per line."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ParameterError(f"series must be one-dimensional, got shape {arr.shape}")
    with open(path, "w", encoding="utf-8") as fh:
        for v in arr:
            fh.write(f"{v:.17g}\n")


def render_document(doc):
    """Serialize a result document: sorted keys off, insertion order kept."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_document(doc))


def read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}")

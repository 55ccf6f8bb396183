"""Deterministic report writers: canonical JSON, CSV, and figure files.

Every writer lands its bytes atomically — content goes to a temporary file
in the destination directory which is then ``os.replace``d over the target
— so a crashed run never leaves a half-written artifact, and two runs with
identical inputs produce byte-identical outputs.

Conventions
-----------
* JSON is canonical: keys sorted, two-space indent, fixed separators, a
  single trailing newline.  Floats serialize through :func:`repr` (via the
  standard encoder), which is shortest-round-trip in Python 3.
* CSV uses a bare ``\\n`` line terminator on every platform.  ``None``
  renders as the empty cell; floats render as ``repr``; everything else as
  ``str``.
* Figures go through the Agg backend with the ``Software`` metadata entry
  suppressed, so PNG bytes do not embed a toolkit version banner.
"""

from __future__ import annotations

import dataclasses
import io
import json
import math
import os
import tempfile
from fractions import Fraction
from os import PathLike
from typing import Any, Iterable, Sequence

import numpy as np

__all__ = [
    "canonical_json",
    "jsonable",
    "save_figure",
    "write_csv",
    "write_json",
    "write_text",
]

_PathArg = str | PathLike[str]


def jsonable(value: Any) -> Any:
    """Recursively coerce report objects into JSON-encodable structures."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, float):
        return float(value)
    if isinstance(value, int):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.complexfloating):
        return jsonable(complex(value))
    if isinstance(value, np.ndarray):
        return [jsonable(item) for item in value.tolist()]
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {
            field.name: jsonable(getattr(value, field.name))
            for field in dataclasses.fields(value)
        }
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [jsonable(item) for item in items]
    raise TypeError(f"cannot serialize {type(value).__name__} into a report")


def canonical_json(payload: Any) -> str:
    """The unique serialization used for every JSON artifact."""
    return (
        json.dumps(jsonable(payload), sort_keys=True, indent=2, separators=(",", ": "))
        + "\n"
    )


def _atomic_write_bytes(path: _PathArg, blob: bytes) -> None:
    target = os.fspath(path)
    directory = os.path.dirname(target) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(blob)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_text(path: _PathArg, text: str) -> None:
    """Atomically write UTF-8 text."""
    _atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path: _PathArg, payload: Any) -> None:
    """Atomically write ``payload`` as canonical JSON."""
    write_text(path, canonical_json(payload))


def _render_cell(value: Any) -> str:
    if value is None:
        return ""
    # np.float64 subclasses float, so coerce before repr to render bare digits.
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(
    path: _PathArg,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> None:
    """Atomically write a delimited table with a fixed header row."""
    import csv

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        if len(row) != len(header):
            raise ValueError(
                f"row has {len(row)} cells but header has {len(header)}: {row!r}"
            )
        writer.writerow([_render_cell(cell) for cell in row])
    write_text(path, buffer.getvalue())


def save_figure(path: _PathArg, figure: Any) -> None:
    """Atomically write a matplotlib figure as PNG without version metadata."""
    buffer = io.BytesIO()
    figure.savefig(buffer, format="png", dpi=100, metadata={"Software": None})
    _atomic_write_bytes(path, buffer.getvalue())

"""Atomic CSV output with fixed 12-significant-digit floats."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path

__all__ = ["format_value", "write_csv", "write_text"]


def format_value(x) -> str:
    if isinstance(x, (bool, str)):
        return str(x)
    if isinstance(x, int) or (hasattr(x, "dtype") and x.dtype.kind in "iu"):
        return str(int(x))
    return f"{float(x):.11e}"


def write_text(path, text: str) -> Path:
    """Write through a temporary file in the same directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_csv(path, header, rows) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return write_text(path, buf.getvalue())

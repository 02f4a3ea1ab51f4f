"""Deterministic CSV/JSON emitters with atomic writes.

Floats are written with 12 significant digits so that identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

OUTPUT_DIR_ENV = "S3CONFORMAL_OUTPUT_DIR"
SIGNIFICANT_DIGITS = 12
FORMATS = ("csv", "json")


def format_float(value: float) -> str:
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def _plain(value: Any) -> Any:
    """Convert numpy scalars/arrays and round floats for JSON output."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return str(value)
        return float(format_float(value))
    return value


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if value is None:
        return ""
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def render_json(payload: Any) -> str:
    return json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n"


def render_records(records: Sequence[dict], fmt: str) -> str:
    """Render a list of flat dicts in the requested format."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    if fmt == "json":
        return render_json(list(records))
    header = list(records[0]) if records else []
    return render_csv(header, ([r[h] for h in header] for r in records))


def atomic_write_text(path, text: str) -> Path:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def resolve_output(output, default_name: str, out_dir=None) -> Path | None:
    """Destination for a command's main output; None means stdout.

    ``output`` of "-" forces stdout. A relative ``output`` and the default
    name are both placed under ``out_dir`` or the environment directory when
    either is set.
    """
    if output == "-":
        return None
    base = out_dir if out_dir is not None else os.environ.get(OUTPUT_DIR_ENV)
    if output is not None:
        path = Path(output)
        return path if path.is_absolute() or not base else Path(base) / path
    return Path(base) / default_name if base else None

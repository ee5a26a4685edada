"""CSV and JSON sidecar output.

Floats are written with 17 significant digits, which round-trips every
IEEE double, so re-reading and re-writing a file reproduces it byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path

from .. import __version__


def format_float(value) -> str:
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return ""
    return f"{value:.17g}"


def parse_float(text: str):
    return None if text == "" else float(text)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else format_float(v) for v in row])
    return buf.getvalue()


def read_csv(path) -> tuple[list[str], list[list]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[parse_float(v) for v in row] for row in reader]
    return header, rows


def write_csv(path, header, rows, metadata: dict | None = None) -> Path:
    """Write the CSV and, when ``metadata`` is given, a ``.json`` sidecar next to it."""
    path = Path(path)
    text = csv_text(header, rows)
    path.write_text(text, encoding="utf-8", newline="\n")
    if metadata is not None:
        write_sidecar(path, text, metadata)
    return path


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def write_sidecar(csv_path: Path, text: str, metadata: dict) -> Path:
    meta = {"tool": "vsystem", "tool_version": __version__,
            "content_sha256": content_hash(text), **metadata}
    meta.setdefault("warnings", [])
    side = csv_path.with_name(csv_path.name + ".json")
    side.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_jsonable) + "\n",
                    encoding="utf-8")
    return side


def _jsonable(obj):
    if hasattr(obj, "as_dict"):
        return obj.as_dict()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "value"):
        return obj.value
    return str(obj)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable)

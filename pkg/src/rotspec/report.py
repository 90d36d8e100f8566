"""Deterministic text output: key/value reports, CSV curves, atomic writes.

Reports are indented key/value documents with a stable field order; all
floating-point values are printed with nine significant digits so repeated
runs diff cleanly.  Files are written through a temporary sibling and an
atomic rename, so an interrupted run never leaves a partial file at the
declared path.
"""

import csv
import io
import os
import tempfile
from typing import Mapping, Sequence


def fmt(value) -> str:
    """Canonical scalar formatting: 9 significant digits for floats."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def render_report(title: str, body: Mapping) -> str:
    """Render a nested mapping as an indented key/value document.

    Mappings nest one indent level; sequences of mappings render as
    repeated blocks; scalar sequences render space-separated.  Insertion
    order is preserved, which is what makes the output diffable.
    """
    lines = [title]
    _render_mapping(body, lines, indent=1)
    return "\n".join(lines) + "\n"


def _render_mapping(mapping: Mapping, lines: list[str], indent: int) -> None:
    pad = "  " * indent
    for key, value in mapping.items():
        if isinstance(value, Mapping):
            lines.append(f"{pad}{key}:")
            _render_mapping(value, lines, indent + 1)
        elif isinstance(value, (list, tuple)):
            if value and isinstance(value[0], Mapping):
                lines.append(f"{pad}{key}:")
                for item in value:
                    lines.append(f"{pad}  -")
                    _render_mapping(item, lines, indent + 2)
            else:
                rendered = " ".join(fmt(v) for v in value)
                lines.append(f"{pad}{key}: [{rendered}]")
        else:
            lines.append(f"{pad}{key}: {fmt(value)}")


def render_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise

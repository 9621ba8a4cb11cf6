# app/utils/artifacts.py
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

from app.core.config import settings
from app.exceptions.base import ArtifactWriteError
from app.schemas.average import AverageSample, BlowupRow, RiemannRow

logger = logging.getLogger(__name__)

SCAN_HEADER = ["s", "t", "norm"]
BLOWUP_HEADER = ["q", "s", "t", "norm", "predicted"]
RIEMANN_HEADER = ["mesh_exponent", "mesh", "cells", "norm"]


def format_cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.{settings.CSV_DIGITS}g}"
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buffer.getvalue()


def render_json(document: Any) -> str:
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def render_table(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Right-aligned text columns."""
    cells: List[List[str]] = [list(header)] + [[format_cell(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def scan_rows(samples: Iterable[AverageSample]) -> List[List[float]]:
    return [[s.s, s.t, s.norm] for s in samples]


def blowup_rows(rows: Iterable[BlowupRow]) -> List[List[Any]]:
    return [[r.q, r.s, r.t, r.norm, r.predicted] for r in rows]


def riemann_rows(rows: Iterable[RiemannRow]) -> List[List[Any]]:
    return [[r.mesh_exponent, r.mesh, r.cells, r.norm] for r in rows]


def write_artifact(text: str, out: Optional[str] = None) -> None:
    """Writes `text` to `out`, or to stdout when no path is given."""
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise ArtifactWriteError(str(path), e.strerror or str(e))
    logger.info("wrote %s (%d bytes)", path, len(text.encode("utf-8")))

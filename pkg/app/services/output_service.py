"""
Output Service

Writes diagnostics time series and fuzz reports to disk. Every file is
written to a temporary sibling and moved into place, so a reader sees
either the complete file or nothing.
"""

import logging
import os
import tempfile
from contextlib import contextmanager
from typing import Iterator, List, Sequence, TextIO

import numpy as np

from app.models.response import CSV_COLUMNS, DiagnosticsRecord, FuzzTrial, SimulationResponse

# Configure logging
logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
FUZZ_COLUMNS = ("index", "seed", "margin_1", "margin_2", "degenerate")


@contextmanager
def atomic_writer(path: str) -> Iterator[TextIO]:
    """Open a temporary file next to ``path``; rename it over ``path`` only on success."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            yield handle
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def records_to_csv(records: Sequence[DiagnosticsRecord], handle: TextIO) -> None:
    """Header line, then one row per record with 17 significant digits."""
    handle.write(",".join(CSV_COLUMNS) + "\n")
    if records:
        rows = np.array([record.csv_row() for record in records], dtype=float)
        np.savetxt(handle, rows, fmt=FLOAT_FORMAT, delimiter=",")


def write_csv(path: str, records: Sequence[DiagnosticsRecord]) -> None:
    with atomic_writer(path) as handle:
        records_to_csv(records, handle)
    logger.info(f"✅ Wrote {len(records)} records to {path}")


def write_json(path: str, response: SimulationResponse) -> None:
    with atomic_writer(path) as handle:
        handle.write(response.json(indent=2, exclude={"generated_at"}))
        handle.write("\n")
    logger.info(f"✅ Wrote {len(response.records)} records to {path}")


def write_fuzz_report(path: str, rows: List[FuzzTrial]) -> None:
    with atomic_writer(path) as handle:
        handle.write(",".join(FUZZ_COLUMNS) + "\n")
        for row in rows:
            handle.write(
                f"{row.index},{row.seed},{FLOAT_FORMAT % row.margin_1},"
                f"{FLOAT_FORMAT % row.margin_2},{int(row.degenerate)}\n"
            )
    logger.info(f"✅ Wrote {len(rows)} fuzz trials to {path}")

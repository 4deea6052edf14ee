"""Gaze record files: CSV with header participant,t,x,y.

The t column orders samples within a participant and must be non-decreasing;
coordinates are clamped into the stimulus on ingest. Scan-paths renumber
samples consecutively since the recording rate is uniform.
"""

from __future__ import annotations

import csv
import io

from .model import GazePoint, ScanPath

HEADER = ["participant", "t", "x", "y"]


class GazeCsvError(ValueError):
    """Malformed gaze CSV; carries the 1-based row number of the offender."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


def parse_gaze_csv(text: str, stimulus_size: tuple[int, int] | None = None) -> dict[str, ScanPath]:
    """Parse gaze records into one ScanPath per participant.

    Raises GazeCsvError with the offending row number on any malformed row.
    A header-only file yields an empty mapping.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise GazeCsvError(1, "missing header") from None
    if [h.strip() for h in header] != HEADER:
        raise GazeCsvError(1, f"expected header {','.join(HEADER)}")

    raw: dict[str, list[tuple[float, float, float]]] = {}
    last_t: dict[str, float] = {}
    for row_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 4:
            raise GazeCsvError(row_no, f"expected 4 fields, got {len(row)}")
        participant = row[0].strip()
        if not participant:
            raise GazeCsvError(row_no, "empty participant id")
        try:
            t, x, y = float(row[1]), float(row[2]), float(row[3])
        except ValueError:
            raise GazeCsvError(row_no, "non-numeric t/x/y") from None
        if participant in last_t and t < last_t[participant]:
            raise GazeCsvError(row_no, f"t decreases for participant {participant}")
        last_t[participant] = t
        if stimulus_size is not None:
            w, h = stimulus_size
            x = min(max(x, 0.0), w - 1e-6)
            y = min(max(y, 0.0), h - 1e-6)
        raw.setdefault(participant, []).append((t, x, y))

    paths = {}
    for participant, samples in raw.items():
        points = tuple(GazePoint(x=x, y=y, t=i) for i, (_, x, y) in enumerate(samples))
        paths[participant] = ScanPath(participant=participant, points=points)
    return paths


def gaze_to_csv(paths: dict[str, ScanPath]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(HEADER)
    for participant in sorted(paths):
        for p in paths[participant].points:
            writer.writerow([participant, p.t, f"{p.x:g}", f"{p.y:g}"])
    return out.getvalue()

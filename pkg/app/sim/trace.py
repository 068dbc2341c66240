import csv
from typing import Optional, TextIO

TRACE_COLUMNS = ["time", "kind", "station", "vehicle", "order"]


class TraceWriter:
    """Event trace as CSV: one row per processed event, plus one per boarding start."""

    def __init__(self, stream: TextIO):
        self._writer = csv.writer(stream, lineterminator="\n")
        self._writer.writerow(TRACE_COLUMNS)
        self.rows = 0

    def record(
        self,
        time: float,
        kind: str,
        station: Optional[str] = None,
        vehicle: Optional[int] = None,
        order: Optional[int] = None,
    ) -> None:
        self._writer.writerow(
            [
                repr(float(time)),
                kind,
                station or "",
                "" if vehicle is None else vehicle,
                "" if order is None else order,
            ]
        )
        self.rows += 1

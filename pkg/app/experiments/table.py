"""Cross-seed aggregation of sweep rows into a fixed-width text table."""

import math
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from app.experiments.sweep import horizon_sort_key
from app.schemas.metrics import MetricsReport

CENSORED_LABEL = ">2h"


def _cell(values: Sequence[float], digits: int) -> str:
    median = float(np.median(values))
    text = _number(median, digits)
    if len(values) > 1:
        text += f" [{_number(min(values), digits)}, {_number(max(values), digits)}]"
    return text


def _number(value: float, digits: int) -> str:
    if math.isinf(value):
        return CENSORED_LABEL
    return f"{value:.{digits}f}"


def emit_table(reports: Iterable[MetricsReport], rest: bool = True) -> str:
    """
    Median (with min and max) of each metric per horizon.

    Censored Rest counts as +inf, so it wins the median once at least half of
    the seeds censor.
    """
    groups: Dict[Optional[float], List[MetricsReport]] = {}
    for report in reports:
        groups.setdefault(report.horizon, []).append(report)
    if not groups:
        raise ValueError("no rows to tabulate")

    header = ["Horizon", "AWT [s]", "AQL [groups]", "maxQL [groups]"]
    if rest:
        header.append("Rest [min]")
    lines = [header]
    for horizon in sorted(groups, key=horizon_sort_key):
        group = groups[horizon]
        line = [
            "no horizon" if horizon is None else f"{horizon:g}",
            _cell([r.awt_s for r in group], 1),
            _cell([r.aql_groups for r in group], 2),
            _cell([float(r.maxql_groups) for r in group], 0),
        ]
        if rest:
            line.append(
                _cell([math.inf if r.rest_censored else r.rest_min for r in group], 1)
            )
        lines.append(line)

    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return "\n".join(
        " | ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip() for line in lines
    ) + "\n"

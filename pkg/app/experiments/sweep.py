"""
Horizon x seed sweeps.

Rows are ordered by (scenario, horizon, seed) with Unlimited first and finite
horizons descending, never by completion order, so parallel and sequential
sweeps write identical CSV.
"""

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple

from app import __version__
from app.core.errors import SimulationError
from app.experiments.loader import dump_scenario
from app.schemas.management import AdaptiveParams, format_horizon
from app.schemas.metrics import CSV_COLUMNS, MetricsReport
from app.schemas.scenario import ScenarioFile
from app.sim.engine import run
from app.sim.metrics import NETWORK_SCOPE
from app.sim.trace import TraceWriter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepTask:
    scenario: ScenarioFile
    horizon: Optional[float]
    seed: int
    adaptive: bool = False
    scope: str = NETWORK_SCOPE
    trace_path: Optional[str] = None


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    horizon: Optional[float]
    seed: int
    report: Optional[MetricsReport] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def horizon_sort_key(horizon: Optional[float]) -> Tuple[int, float]:
    return (0, 0.0) if horizon is None else (1, -horizon)


def trace_path_for(base: str, horizon: Optional[float], seed: int, single: bool) -> str:
    """``<stem>_h<horizon>_s<seed><suffix>`` next to ``base`` unless the sweep is a single run."""
    if single:
        return base
    path = Path(base)
    return str(path.with_name(f"{path.stem}_h{format_horizon(horizon)}_s{seed}{path.suffix or '.csv'}"))


def run_task(task: SweepTask) -> SweepRow:
    """Execute one sweep cell; simulation errors become an error row."""
    params = task.scenario.management.model_copy(update={"horizon": task.horizon})
    if task.adaptive and params.adaptive is None:
        params = params.model_copy(update={"adaptive": AdaptiveParams()})
    try:
        if task.trace_path is not None:
            with open(task.trace_path, "w", encoding="utf-8", newline="") as stream:
                result = run(task.scenario, params, task.seed, trace=TraceWriter(stream))
        else:
            result = run(task.scenario, params, task.seed)
        report = result.report_for(task.scope)
    except SimulationError as exc:
        return SweepRow(task.scenario.name, task.horizon, task.seed, error=f"{type(exc).__name__}: {exc}")
    return SweepRow(task.scenario.name, task.horizon, task.seed, report=report)


def sweep(
    scenario: ScenarioFile,
    horizons: Sequence[Optional[float]],
    seeds: Sequence[int],
    *,
    adaptive: bool = False,
    scope: str = NETWORK_SCOPE,
    workers: int = 1,
    trace: Optional[str] = None,
) -> List[SweepRow]:
    """
    One run per (horizon, seed).

    Args:
        scenario: Validated scenario
        horizons: Horizons to test; None is Unlimited
        seeds: Master seeds
        adaptive: Enable the adaptive-horizon controller
        scope: ``network`` or a station id
        workers: Process pool size; 1 runs in-process
        trace: Event trace path; one file per run for multi-run sweeps

    Returns:
        Rows in (scenario, horizon, seed) order
    """
    if not horizons or not seeds:
        raise ValueError("sweep needs at least one horizon and one seed")
    cells = sorted(
        {(horizon, seed) for horizon in horizons for seed in seeds},
        key=lambda cell: (horizon_sort_key(cell[0]), cell[1]),
    )
    single = len(cells) == 1
    tasks = [
        SweepTask(
            scenario=scenario,
            horizon=horizon,
            seed=seed,
            adaptive=adaptive,
            scope=scope,
            trace_path=None if trace is None else trace_path_for(trace, horizon, seed, single),
        )
        for horizon, seed in cells
    ]
    logger.info("sweep %s: %d runs on %d worker(s)", scenario.name, len(tasks), workers)

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_task, tasks))
    else:
        rows = [run_task(task) for task in tasks]

    for row in rows:
        if not row.ok:
            logger.warning(
                "run %s horizon=%s seed=%d failed: %s",
                row.scenario,
                format_horizon(row.horizon),
                row.seed,
                row.error,
            )
    return rows


def write_csv(
    rows: Iterable[SweepRow],
    stream: TextIO,
    scenario: ScenarioFile,
    horizons: Sequence[Optional[float]],
    seeds: Sequence[int],
    *,
    adaptive: bool = False,
    scope: str = NETWORK_SCOPE,
) -> None:
    """Manifest comment block, header, one row per run, failed runs as ``# error:`` lines."""
    stream.write(f"# prt-horizon-sim {__version__}\n")
    stream.write(f"# horizons: {','.join(format_horizon(h) for h in sorted(set(horizons), key=horizon_sort_key))}\n")
    stream.write(f"# seeds: {','.join(str(seed) for seed in sorted(set(seeds)))}\n")
    stream.write(f"# adaptive: {'on' if adaptive else 'off'}\n")
    stream.write(f"# scope: {scope}\n")
    for line in dump_scenario(scenario).splitlines():
        stream.write(f"# {line}\n")

    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        if row.ok:
            writer.writerow(row.report.csv_row())
        else:
            stream.write(
                f"# error: scenario={row.scenario} horizon={format_horizon(row.horizon)} "
                f"seed={row.seed}: {row.error}\n"
            )

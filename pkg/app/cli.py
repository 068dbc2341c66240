"""
Command line interface.

Exit codes: 0 success, 1 some sweep runs failed, 2 invalid arguments or scenario.
"""

import argparse
import logging
import sys
from typing import List, Optional, Sequence

from app.core.config import get_settings
from app.core.errors import SimulationError
from app.core.logging import setup_logging
from app.experiments.loader import dump_scenario, load_scenario
from app.experiments.sweep import sweep, write_csv
from app.experiments.table import emit_table
from app.schemas.demand import ScenarioKind
from app.schemas.management import parse_horizon
from app.sim.metrics import NETWORK_SCOPE

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUN_FAILED = 1
EXIT_INVALID = 2


def parse_horizons(text: str) -> List[Optional[float]]:
    horizons = []
    for token in text.split(","):
        try:
            horizon = parse_horizon(token)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid horizon {token!r}") from None
        if horizon is not None and horizon < 0:
            raise argparse.ArgumentTypeError(f"horizon must be nonnegative, got {token!r}")
        horizons.append(horizon)
    return horizons


def parse_seeds(text: str) -> List[int]:
    """Comma-separated seeds; ``a-b`` expands to an inclusive range."""
    seeds: List[int] = []
    try:
        for token in text.split(","):
            token = token.strip()
            if "-" in token.lstrip("-"):
                low, high = token.split("-", 1)
                seeds.extend(range(int(low), int(high) + 1))
            else:
                seeds.append(int(token))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed list {text!r}") from None
    if not seeds or any(seed < 0 for seed in seeds):
        raise argparse.ArgumentTypeError(f"seeds must be nonnegative integers, got {text!r}")
    return seeds


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prt-sim",
        description="Horizon-limited empty-vehicle management in a Personal Rapid Transit network.",
    )
    parser.add_argument("--scenario", required=True, help="scenario file or bundled name (e.g. city_uniform)")
    parser.add_argument("--horizon", type=parse_horizons, help="H[,H...]; 'inf' means no horizon")
    parser.add_argument("--seed", type=parse_seeds, help="S[,S...] or A-B")
    parser.add_argument("--out", help="write the CSV here instead of stdout")
    parser.add_argument("--table", action="store_true", help="print the per-horizon median table")
    parser.add_argument("--trace", help="event trace CSV (one file per run in a sweep)")
    parser.add_argument("--adaptive", action="store_true", help="adapt the horizon to observed queues")
    parser.add_argument("--scope", default=NETWORK_SCOPE, help="'network' or a station id")
    parser.add_argument("--workers", type=int, help="parallel runs (default PRT_WORKERS)")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING, ...")
    parser.add_argument("--dump-config", action="store_true", help="print the resolved scenario and exit")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(args.log_level)

    try:
        scenario = load_scenario(args.scenario)
    except SimulationError as exc:
        logger.error("%s", exc)
        return EXIT_INVALID

    if args.dump_config:
        sys.stdout.write(dump_scenario(scenario))
        return EXIT_OK

    if args.scope != NETWORK_SCOPE and args.scope not in scenario.network.station_ids:
        logger.error("unknown scope %r: expected 'network' or a station id", args.scope)
        return EXIT_INVALID
    workers = args.workers if args.workers is not None else settings.WORKERS
    if workers < 1:
        logger.error("--workers must be at least 1")
        return EXIT_INVALID

    horizons = args.horizon if args.horizon is not None else [scenario.management.horizon]
    seeds = args.seed if args.seed is not None else [scenario.run.seed]
    rows = sweep(
        scenario,
        horizons,
        seeds,
        adaptive=args.adaptive,
        scope=args.scope,
        workers=workers,
        trace=args.trace,
    )

    if args.out or not args.table:
        options = dict(adaptive=args.adaptive, scope=args.scope)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as stream:
                write_csv(rows, stream, scenario, horizons, seeds, **options)
        else:
            write_csv(rows, sys.stdout, scenario, horizons, seeds, **options)

    reports = [row.report for row in rows if row.ok]
    if args.table and reports:
        sys.stdout.write(emit_table(reports, rest=scenario.demand.kind != ScenarioKind.UNIFORM))

    return EXIT_OK if all(row.ok for row in rows) else EXIT_RUN_FAILED

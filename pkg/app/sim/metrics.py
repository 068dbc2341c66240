"""
Run statistics: waiting times, time-weighted queue lengths, drain time.

AWT averages over orders. Orders still queued when the run ends contribute
their elapsed (censored) wait. AQL is time-weighted over the observation window,
which closes when every order created up to the end of the heavy phase has
boarded, or at the end of the run if that never happens.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from app.core.errors import NegativeWait, TimeRegression, UnknownStation
from app.schemas.metrics import MetricsReport
from app.sim.demand import TransitOrder
from app.sim.management import DispatchReason

logger = logging.getLogger(__name__)

NETWORK_SCOPE = "network"


def compute_rest(phase_end: float, drained_at: Optional[float], drain_window: float) -> Optional[float]:
    """
    Minutes needed after ``phase_end`` to board every order created up to it.

    Returns:
        Rest in minutes, or None when censored (not drained within ``drain_window``)
    """
    if drained_at is None or drained_at - phase_end > drain_window:
        return None
    return max(0.0, drained_at - phase_end) / 60.0


def queue_growth_per_hour(
    samples: Sequence[Tuple[float, float]],
    start: Optional[float] = None,
    end: Optional[float] = None,
    spacing: Optional[float] = None,
) -> float:
    """
    Least-squares slope (groups/h) of sampled total queue length over ``[start, end]``.

    ``spacing`` keeps only samples taken at multiples of it, thinning out the
    autocorrelation of back-to-back ticks.
    """
    window = [
        (t, q)
        for t, q in samples
        if (start is None or t >= start)
        and (end is None or t <= end)
        and (spacing is None or t % spacing == 0)
    ]
    if len(window) < 2:
        return 0.0
    times = np.array([t for t, _ in window]) / 3600.0
    lengths = np.array([q for _, q in window], dtype=float)
    return float(stats.linregress(times, lengths).slope)


@dataclass
class StationLedger:
    integral: float = 0.0
    last_t: float = 0.0
    length: int = 0
    max_len: int = 0
    waits: List[float] = field(default_factory=list)
    served: int = 0
    generated: int = 0
    pending: int = 0
    drained_at: Optional[float] = None

    def integral_at(self, t: float) -> float:
        return self.integral + self.length * (t - self.last_t)


class MetricsAccumulator:
    """Online statistics of a single run."""

    def __init__(
        self,
        station_ids: Sequence[str],
        heavy_end: float,
        end_of_run: float,
        *,
        scenario: str = "scenario",
        seed: int = 0,
        horizon: Optional[float] = None,
        fleet_size: int = 0,
    ):
        self.station_ids = list(station_ids)
        self.heavy_end = heavy_end
        self.end_of_run = end_of_run
        self.drain_window = end_of_run - heavy_end
        self.scenario = scenario
        self.seed = seed
        self.horizon = horizon
        self.fleet_size = fleet_size
        self.final_horizon = horizon
        self.messages = 0
        self.dispatches: Dict[DispatchReason, int] = {reason: 0 for reason in DispatchReason}
        self.ledgers: Dict[str, StationLedger] = {station: StationLedger() for station in self.station_ids}
        self._checkpoints: Dict[float, Dict[str, float]] = {}
        self._heavy_end_reached = False
        self._closed_at: Optional[float] = None

    def ledger(self, station: str) -> StationLedger:
        try:
            return self.ledgers[station]
        except KeyError:
            raise UnknownStation(station) from None

    def order_created(self, order: TransitOrder) -> None:
        ledger = self.ledger(order.origin)
        ledger.generated += 1
        if order.created_at <= self.heavy_end:
            ledger.pending += 1

    def record_wait(self, order: TransitOrder, boarding_start: float) -> float:
        wait = boarding_start - order.created_at
        if wait < 0:
            raise NegativeWait(order.id, wait)
        ledger = self.ledger(order.origin)
        ledger.waits.append(wait)
        ledger.served += 1
        if order.created_at <= self.heavy_end:
            ledger.pending -= 1
            if ledger.pending == 0 and self._heavy_end_reached:
                self._drained(order.origin, boarding_start)
        return wait

    def observe_queue(self, station: str, t: float, length: int) -> None:
        ledger = self.ledger(station)
        if t < ledger.last_t:
            raise TimeRegression(station, ledger.last_t, t)
        ledger.integral += ledger.length * (t - ledger.last_t)
        ledger.last_t = t
        ledger.length = length
        if length > ledger.max_len:
            ledger.max_len = length

    def reach_heavy_end(self, t: float) -> None:
        """Stations with nothing left from the heavy phase drain at ``t``."""
        self._heavy_end_reached = True
        for station, ledger in self.ledgers.items():
            if ledger.pending == 0 and ledger.drained_at is None:
                self._drained(station, t)

    def count_dispatch(self, reason: DispatchReason) -> None:
        self.dispatches[reason] += 1

    def close(self, t: float, queued: Iterable[TransitOrder]) -> None:
        """Stop observing at ``t``; still-queued orders enter AWT with their elapsed wait."""
        for station, ledger in self.ledgers.items():
            self.observe_queue(station, t, ledger.length)
        for order in queued:
            self.ledger(order.origin).waits.append(t - order.created_at)
        self._closed_at = t

    @property
    def drained_at(self) -> Optional[float]:
        """Time the whole network finished boarding its heavy-phase orders."""
        times = [ledger.drained_at for ledger in self.ledgers.values()]
        if not times or any(t is None for t in times):
            return None
        return max(times)

    def finalize(self, scope: str = NETWORK_SCOPE) -> MetricsReport:
        """
        Aggregate the run for the whole network or a single station.

        Raises:
            UnknownStation: ``scope`` is neither ``network`` nor a station id
        """
        end = self._closed_at if self._closed_at is not None else self.end_of_run
        if scope == NETWORK_SCOPE:
            stations = self.station_ids
            drained_at = self.drained_at
        else:
            stations = [scope]
            drained_at = self.ledger(scope).drained_at

        window_end = end if drained_at is None else max(drained_at, self.heavy_end)
        ledgers = [self.ledgers[station] for station in stations]
        integrals = [self._integral(station, window_end) for station in stations]
        aql = (math.fsum(integrals) / len(stations) / window_end) if window_end > 0 else 0.0

        waits = [wait for ledger in ledgers for wait in ledger.waits]
        awt = math.fsum(waits) / len(waits) if waits else 0.0
        rest = compute_rest(self.heavy_end, drained_at, self.drain_window)

        return MetricsReport(
            scenario=self.scenario,
            horizon=self.horizon,
            seed=self.seed,
            scope=scope,
            awt_s=awt,
            aql_groups=aql,
            maxql_groups=max(ledger.max_len for ledger in ledgers),
            rest_min=rest,
            rest_censored=rest is None,
            served=sum(ledger.served for ledger in ledgers),
            generated=sum(ledger.generated for ledger in ledgers),
            dispatch_calls=self.dispatches[DispatchReason.CALL],
            dispatch_expels=self.dispatches[DispatchReason.EXPEL],
            dispatch_balance=self.dispatches[DispatchReason.BALANCE],
            messages=self.messages,
            duration_s=end,
            fleet_size=self.fleet_size,
            final_horizon=self.final_horizon,
        )

    def _drained(self, station: str, t: float) -> None:
        self.ledgers[station].drained_at = t
        self._checkpoints.setdefault(
            t, {name: ledger.integral_at(t) for name, ledger in self.ledgers.items()}
        )

    def _integral(self, station: str, t: float) -> float:
        if t in self._checkpoints:
            return self._checkpoints[t][station]
        return self.ledgers[station].integral_at(t)

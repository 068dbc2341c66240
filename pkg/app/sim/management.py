"""
Horizon-limited empty-vehicle management.

Each station agent decides from its own state plus snapshots of the stations
inside its horizon. ``gather_snapshots`` is the only way an agent reads another
station, which keeps every decision local and lets the module count messages.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Protocol

from app.core.errors import AuditError, LocalityViolation, SameStation
from app.schemas.management import AdaptiveParams, ManagementParams, format_horizon
from app.sim.network import DistanceMatrix, HorizonTable, horizon_table, quantize

logger = logging.getLogger(__name__)


class DispatchReason(str, Enum):
    CALL = "call"
    EXPEL = "expel"
    BALANCE = "balance"


@dataclass(frozen=True)
class StationSnapshot:
    station: str
    standing_empty: int
    free_berths: int
    queue_len: int
    inbound_empty: int
    inbound_full: int
    timestamp: float


@dataclass(frozen=True)
class Dispatch:
    vehicle_id: int
    source: str
    target: str
    reason: DispatchReason

    def __post_init__(self):
        if self.source == self.target:
            raise SameStation(self.source)

    @property
    def issuer(self) -> str:
        """Station whose agent took the decision."""
        return self.source if self.reason == DispatchReason.EXPEL else self.target


class StateSource(Protocol):
    def snapshot(self, station: str) -> StationSnapshot:
        ...

    def idle_vehicle(self, station: str) -> Optional[int]:
        ...


def score_donor(
    requester: Optional[StationSnapshot],
    candidate: StationSnapshot,
    dist: float,
    aisd: float,
    params: ManagementParams,
) -> float:
    """
    Attractiveness of ``candidate`` as the source of an empty vehicle; higher is better.

    ``dist`` is the travel distance from the candidate to the requester in meters.
    """
    return (
        params.w_standing * candidate.standing_empty
        - params.w_dist * quantize(dist / aisd)
        - params.w_queue * candidate.queue_len
        - params.w_inbound * candidate.inbound_full
    )


def score_recipient(candidate: StationSnapshot, dist: float, aisd: float, params: ManagementParams) -> float:
    """Attractiveness of ``candidate`` as the target of an expelled vehicle."""
    return (
        params.w_berth * candidate.free_berths
        - params.w_dist * quantize(dist / aisd)
        - params.w_standing * candidate.standing_empty
    )


def adapt_horizon(observed_max_queue: float, horizon: Optional[float], params: AdaptiveParams) -> Optional[float]:
    """
    Widen the horizon under long queues, narrow it when the network is quiet.

    An Unlimited horizon stays Unlimited. A horizon already outside
    ``[h_min, h_max]`` never steps away from the band.
    """
    if horizon is None:
        return None
    if observed_max_queue > params.q_up:
        return max(horizon, min(params.h_max, horizon + params.step))
    if observed_max_queue < params.q_down:
        return min(horizon, max(params.h_min, horizon - params.step))
    return horizon


class ManagementModule:
    """Station agents of one run, sharing a horizon table and a message counter."""

    def __init__(self, distances: DistanceMatrix, params: ManagementParams, source: StateSource):
        self.distances = distances
        self.params = params
        self.messages = 0
        self._source = source
        self.table: HorizonTable = horizon_table(distances, params.horizon)

    @property
    def horizon(self) -> Optional[float]:
        return self.table.horizon

    def set_horizon(self, horizon: Optional[float]) -> None:
        if horizon != self.table.horizon:
            logger.debug("horizon %s -> %s", format_horizon(self.table.horizon), format_horizon(horizon))
            self.table = horizon_table(self.distances, horizon)

    def own(self, station: str) -> StationSnapshot:
        return self._source.snapshot(station)

    def gather_snapshots(self, station: str) -> List[StationSnapshot]:
        """Snapshots of exactly the stations inside ``station``'s horizon."""
        neighbors = self.table.of(station)
        self.messages += len(neighbors)
        return [self._source.snapshot(neighbor) for neighbor in neighbors]

    def call_empty(self, station: str) -> Optional[Dispatch]:
        """
        Ask the best visible donor for one empty vehicle.

        Returns:
            A Call dispatch, or None when the station does not need a vehicle or
            no station in its horizon has one standing
        """
        own = self.own(station)
        if (
            own.queue_len < self.params.theta_call
            or own.standing_empty > 0
            or own.inbound_empty >= own.queue_len
        ):
            return None
        best = None
        for candidate in self.gather_snapshots(station):
            if candidate.standing_empty <= 0:
                continue
            dist = self.distances.distance(candidate.station, station)
            score = score_donor(own, candidate, dist, self.distances.aisd, self.params)
            key = (-score, quantize(dist / self.distances.aisd), candidate.station)
            if best is None or key < best:
                best = key
        if best is None:
            return None
        return self._dispatch(best[2], station, DispatchReason.CALL)

    def expel(self, station: str) -> Optional[Dispatch]:
        """
        Send one idle empty vehicle away to make room at a full station.

        The best positive recipient score wins; otherwise the nearest neighbour
        with a free berth. None when no neighbour has room.
        """
        own = self.own(station)
        if own.standing_empty < 1:
            return None
        best = None
        nearest = None
        for candidate in self.gather_snapshots(station):
            if candidate.free_berths <= 0:
                continue
            dist = self.distances.distance(station, candidate.station)
            r = quantize(dist / self.distances.aisd)
            score = score_recipient(candidate, dist, self.distances.aisd, self.params)
            if score > 0 and (best is None or (-score, r, candidate.station) < best):
                best = (-score, r, candidate.station)
            if nearest is None or (r, candidate.station) < nearest:
                nearest = (r, candidate.station)
        if best is not None:
            target = best[2]
        elif nearest is not None:
            target = nearest[1]
        else:
            return None
        return self._dispatch(station, target, DispatchReason.EXPEL)

    def balance(self, stations: Optional[Iterable[str]] = None) -> List[Dispatch]:
        """
        Periodic redistribution from surplus stations to starved ones.

        Requesters are served by descending queue length, then id. Each donor
        gives at most one vehicle per call.
        """
        stations = list(self.distances.station_ids if stations is None else stations)
        requesters = []
        for station in stations:
            own = self.own(station)
            if (
                own.standing_empty < self.params.theta_deficit
                and own.queue_len > 0
                and own.inbound_empty < own.queue_len
            ):
                requesters.append(own)
        requesters.sort(key=lambda snapshot: (-snapshot.queue_len, snapshot.station))

        used = set()
        dispatches: List[Dispatch] = []
        for requester in requesters:
            best = None
            for candidate in self.gather_snapshots(requester.station):
                if candidate.station in used or candidate.standing_empty <= self.params.theta_surplus:
                    continue
                dist = self.distances.distance(candidate.station, requester.station)
                score = score_donor(requester, candidate, dist, self.distances.aisd, self.params)
                key = (-score, quantize(dist / self.distances.aisd), candidate.station)
                if best is None or key < best:
                    best = key
            if best is not None:
                used.add(best[2])
                dispatches.append(self._dispatch(best[2], requester.station, DispatchReason.BALANCE))
        return dispatches

    def check_locality(self, dispatch: Dispatch) -> None:
        other = dispatch.target if dispatch.issuer == dispatch.source else dispatch.source
        if not self.table.contains(dispatch.issuer, other):
            raise LocalityViolation(
                f"{dispatch.reason.value} {dispatch.source}->{dispatch.target} leaves the horizon "
                f"{format_horizon(self.horizon)} of {dispatch.issuer}"
            )

    def _dispatch(self, source: str, target: str, reason: DispatchReason) -> Dispatch:
        vehicle_id = self._source.idle_vehicle(source)
        if vehicle_id is None:
            raise AuditError(f"{source} reported standing vehicles but has none idle")
        dispatch = Dispatch(vehicle_id=vehicle_id, source=source, target=target, reason=reason)
        logger.debug("dispatch %s vehicle %d %s->%s", reason.value, vehicle_id, source, target)
        return dispatch

"""Transit-order generation: Poisson streams, group sizes, destinations and the named scenarios."""

import hashlib
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np

from app.core.errors import AllZeroWeights, NonPositiveMean, UnknownEventStation
from app.schemas.demand import DemandPhase, GroupSizeDistribution, ScenarioKind

logger = logging.getLogger(__name__)

PARTICIPANTS = 4219
DEFAULT_EVENT_STATION = "I"
HEAVY_DURATION_S = 7200.0
UNIFORM_MEAN_MIN = 0.856
BACKGROUND_MEAN_MIN = 15.0  # 4 groups/h


@dataclass(frozen=True)
class TransitOrder:
    id: int
    origin: str
    destination: str
    size: int
    created_at: float


def sample_interarrival(mean: float, rng: np.random.Generator, size: Optional[int] = None):
    """
    Exponential inter-arrival time in seconds for a mean given in minutes.

    With ``size`` set, returns an array of that many draws.
    """
    if not mean > 0:
        raise NonPositiveMean(mean)
    if size is None:
        return float(rng.exponential(mean * 60.0))
    return rng.exponential(mean * 60.0, size=size)


def sample_group_size(dist: GroupSizeDistribution, rng: np.random.Generator, size: Optional[int] = None):
    sizes = np.arange(1, 5)
    if size is None:
        return int(rng.choice(sizes, p=dist.probabilities))
    return rng.choice(sizes, p=dist.probabilities, size=size)


def sample_destination(origin: str, weights: Mapping[str, float], rng: np.random.Generator) -> str:
    """Draw a destination other than ``origin`` proportionally to ``weights``."""
    candidates = [(station, weight) for station, weight in weights.items() if station != origin and weight > 0]
    total = sum(weight for _, weight in candidates)
    if not total > 0:
        raise AllZeroWeights(origin)
    draw = rng.random() * total
    for station, weight in candidates:
        draw -= weight
        if draw < 0:
            return station
    return candidates[-1][0]


def build_scenario(
    kind: Union[ScenarioKind, str],
    net,
    event_station: Optional[str] = DEFAULT_EVENT_STATION,
    heavy_duration: float = HEAVY_DURATION_S,
    tail: float = HEAVY_DURATION_S,
) -> List[DemandPhase]:
    """
    Demand phases of one of the three transport tasks.

    Args:
        kind: ``uniform``, ``event_inbound`` or ``event_outbound``
        net: Network (anything exposing ``station_ids``)
        event_station: Station next to the event area
        heavy_duration: Length of the heavy phase, seconds
        tail: Background traffic after the heavy phase, seconds

    Returns:
        Phases in generation order; the background phase is never heavy

    Raises:
        UnknownEventStation: Event scenario on a network without ``event_station``
    """
    kind = ScenarioKind(kind)
    station_ids = list(net.station_ids)
    end = heavy_duration + tail
    hours = heavy_duration / 3600.0

    if kind == ScenarioKind.UNIFORM:
        return [
            DemandPhase(
                name="uniform",
                start=0.0,
                end=heavy_duration,
                mean_interarrival_min={station: UNIFORM_MEAN_MIN for station in station_ids},
                group_sizes=GroupSizeDistribution.uniform(),
            ),
            DemandPhase(
                name="background",
                start=heavy_duration,
                end=end,
                mean_interarrival_min={station: BACKGROUND_MEAN_MIN for station in station_ids},
                heavy=False,
            ),
        ]

    if event_station not in station_ids:
        raise UnknownEventStation(event_station)
    background = DemandPhase(
        name="background",
        start=0.0,
        end=end,
        mean_interarrival_min={station: BACKGROUND_MEAN_MIN for station in station_ids},
        heavy=False,
    )

    if kind == ScenarioKind.EVENT_INBOUND:
        feeders = [station for station in station_ids if station != event_station]
        groups = GroupSizeDistribution.event_inbound()
        persons_per_hour = PARTICIPANTS / (hours * len(feeders))
        mean = 60.0 / (persons_per_hour / groups.mean)
        heavy = DemandPhase(
            name="event",
            start=0.0,
            end=heavy_duration,
            mean_interarrival_min={station: mean for station in feeders},
            destination_weights={station: {event_station: 1.0} for station in feeders},
            group_sizes=groups,
        )
    else:
        groups = GroupSizeDistribution.event_outbound()
        mean = 60.0 / (PARTICIPANTS / hours / groups.mean)
        heavy = DemandPhase(
            name="event",
            start=0.0,
            end=heavy_duration,
            mean_interarrival_min={event_station: mean},
            group_sizes=groups,
        )
    logger.debug("%s: heavy mean inter-arrival %.5f min", kind.value, mean)
    return [heavy, background]


def station_rate_per_hour(phases: Iterable[DemandPhase], station: str, t: float) -> float:
    """Aggregate order rate (groups/h) of every phase active at ``t`` for ``station``."""
    return sum(
        60.0 / phase.mean_interarrival_min[station]
        for phase in phases
        if phase.start <= t < phase.end and station in phase.mean_interarrival_min
    )


def stable_hash(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:4], "big")


def stream_rng(seed: int, phase: str, station: str) -> np.random.Generator:
    """Independent generator per (phase, station); unaffected by other streams."""
    sequence = np.random.SeedSequence(seed, spawn_key=(stable_hash(phase), stable_hash(station)))
    return np.random.default_rng(sequence)


class OrderStream:
    """Poisson order source of one phase at one station."""

    def __init__(self, phase: DemandPhase, station: str, station_ids: Sequence[str], seed: int):
        self.phase = phase
        self.station = station
        self.mean = phase.mean_interarrival_min[station]
        self.weights: Dict[str, float] = phase.destination_row(station, list(station_ids))
        self.rng = stream_rng(seed, phase.name, station)

    def first_arrival(self) -> Optional[float]:
        return self.next_arrival(self.phase.start)

    def next_arrival(self, now: float) -> Optional[float]:
        t = now + sample_interarrival(self.mean, self.rng)
        return t if t < self.phase.end else None

    def draw(self, order_id: int, now: float) -> TransitOrder:
        destination = sample_destination(self.station, self.weights, self.rng)
        size = sample_group_size(self.phase.group_sizes, self.rng)
        return TransitOrder(
            id=order_id, origin=self.station, destination=destination, size=size, created_at=now
        )

    def __repr__(self) -> str:
        return f"OrderStream({self.phase.name}@{self.station})"


def build_streams(phases: Iterable[DemandPhase], station_ids: Sequence[str], seed: int) -> List[OrderStream]:
    return [
        OrderStream(phase, station, station_ids, seed)
        for phase in phases
        for station in phase.mean_interarrival_min
    ]

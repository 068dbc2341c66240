"""
Track topology, all-pairs shortest paths and horizon neighbourhoods.

Distances are shortest directed path lengths in meters. The matrix is not
symmetric on one-way track. AISD (average inter-station distance) is the mean
of ``d[i][j]`` over all ordered pairs ``i != j``; horizons are multiples of it.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from app.core.errors import NegativeHorizon, SameStation, UnknownStation, UnreachablePair
from app.schemas.network import LinkDescriptor, NetworkSpec, StationDescriptor

logger = logging.getLogger(__name__)

# Normalised distances and travel times are compared at this many decimals so
# that rescaling every length by the same factor cannot flip a comparison.
RESOLUTION_DIGITS = 9


def quantize(value: float) -> float:
    return round(value, RESOLUTION_DIGITS)


class Network:
    """Immutable directed track graph."""

    def __init__(self, stations: Sequence[StationDescriptor], links: Sequence[LinkDescriptor]):
        self.station_ids: Tuple[str, ...] = tuple(station.id for station in stations)
        self.index: Dict[str, int] = {station_id: i for i, station_id in enumerate(self.station_ids)}
        self.berth_counts: Dict[str, int] = {station.id: station.berth_count for station in stations}
        self.links: Tuple[LinkDescriptor, ...] = tuple(links)

        # parallel links collapse to the shortest one
        out_links: Dict[str, Dict[str, float]] = {station_id: {} for station_id in self.station_ids}
        for link in self.links:
            for end in (link.source, link.target):
                if end not in self.index:
                    raise UnknownStation(end)
            current = out_links[link.source].get(link.target)
            if current is None or link.length < current:
                out_links[link.source][link.target] = link.length
        self.out_links = out_links
        self._distances: Optional["DistanceMatrix"] = None

    @classmethod
    def from_spec(cls, spec: NetworkSpec) -> "Network":
        return cls(spec.stations, spec.links)

    def scaled(self, factor: float) -> "Network":
        """Copy with every link length multiplied by ``factor``."""
        if not factor > 0:
            raise ValueError(f"scale factor must be positive, got {factor}")
        stations = [
            StationDescriptor(id=station_id, berth_count=self.berth_counts[station_id])
            for station_id in self.station_ids
        ]
        links = [
            LinkDescriptor(source=link.source, target=link.target, length=link.length * factor)
            for link in self.links
        ]
        return Network(stations, links)

    def require(self, station: str) -> int:
        try:
            return self.index[station]
        except KeyError:
            raise UnknownStation(station) from None

    @property
    def distances(self) -> "DistanceMatrix":
        if self._distances is None:
            self._distances = build_distance_matrix(self)
        return self._distances

    def __len__(self) -> int:
        return len(self.station_ids)

    def __repr__(self) -> str:
        return f"Network(stations={len(self.station_ids)}, links={len(self.links)})"


@dataclass(frozen=True)
class DistanceMatrix:
    station_ids: Tuple[str, ...]
    d: np.ndarray
    aisd: float
    index: Dict[str, int] = field(repr=False, compare=False)

    def distance(self, source: str, target: str) -> float:
        return float(self.d[self._at(source), self._at(target)])

    def normalized(self, source: str, target: str) -> float:
        """``d[source][target] / AISD`` at the comparison resolution."""
        return quantize(self.distance(source, target) / self.aisd)

    def _at(self, station: str) -> int:
        try:
            return self.index[station]
        except KeyError:
            raise UnknownStation(station) from None


def build_distance_matrix(net: Network) -> DistanceMatrix:
    """
    All-pairs shortest directed path lengths and AISD.

    Args:
        net: Validated network

    Returns:
        DistanceMatrix with ``d[i][i] == 0``

    Raises:
        UnreachablePair: Some ordered pair has no directed path
    """
    n = len(net.station_ids)
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for source, targets in net.out_links.items():
        for target, length in targets.items():
            d[net.index[source], net.index[target]] = length

    for k in range(n):
        np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :], out=d)

    unreachable = np.argwhere(np.isinf(d))
    if unreachable.size:
        i, j = unreachable[0]
        raise UnreachablePair(net.station_ids[i], net.station_ids[j])

    aisd = float(d.sum() / (n * (n - 1))) if n > 1 else 0.0
    d.setflags(write=False)
    return DistanceMatrix(station_ids=net.station_ids, d=d, aisd=aisd, index=dict(net.index))


@dataclass(frozen=True)
class HorizonTable:
    """Neighbour sets per station; ``horizon is None`` means Unlimited."""

    horizon: Optional[float]
    neighbors: Mapping[str, Tuple[str, ...]]

    def of(self, station: str) -> Tuple[str, ...]:
        try:
            return self.neighbors[station]
        except KeyError:
            raise UnknownStation(station) from None

    def contains(self, station: str, other: str) -> bool:
        return other in self.of(station)


def horizon_table(dm: DistanceMatrix, horizon: Optional[float]) -> HorizonTable:
    """
    Stations each station may exchange state with.

    ``j`` is a neighbour of ``i`` when ``j != i`` and ``d[i][j] <= horizon * AISD``.
    The boundary is inclusive.
    """
    if horizon is not None and horizon < 0:
        raise NegativeHorizon(horizon)
    neighbors: Dict[str, Tuple[str, ...]] = {}
    for source in dm.station_ids:
        neighbors[source] = tuple(
            target
            for target in dm.station_ids
            if target != source and (horizon is None or dm.normalized(source, target) <= horizon)
        )
    return HorizonTable(horizon=horizon, neighbors=neighbors)


def route(net: Network, source: str, target: str) -> List[LinkDescriptor]:
    """
    Shortest directed path as an ordered list of links.

    Among links that stay on a shortest path the one leading to the lowest
    station id is taken at every hop.

    Raises:
        SameStation: ``source == target``
    """
    net.require(source)
    net.require(target)
    if source == target:
        raise SameStation(source)
    dm = net.distances
    path: List[LinkDescriptor] = []
    current = source
    while current != target:
        remaining = dm.distance(current, target)
        step = min(
            (
                next_station
                for next_station, length in net.out_links[current].items()
                if np.isclose(length + dm.distance(next_station, target), remaining, rtol=1e-12, atol=0.0)
            ),
            default=None,
        )
        if step is None:
            raise UnreachablePair(current, target)
        path.append(LinkDescriptor(source=current, target=step, length=net.out_links[current][step]))
        current = step
    return path


def path_length(path: Iterable[LinkDescriptor]) -> float:
    return sum(link.length for link in path)

"""Builders shared by the test modules."""

from typing import Dict, Iterable, List, Optional

import networkx as nx
import numpy as np

from app.schemas.network import NetworkSpec
from app.schemas.scenario import ScenarioFile
from app.seed.city import city_scenario_data
from app.sim.management import StationSnapshot


def network_spec(links: Iterable[tuple], berths: Optional[Dict[str, int]] = None) -> NetworkSpec:
    """Build a NetworkSpec from ``(source, target, length)`` triples."""
    links = list(links)
    ids: List[str] = []
    for source, target, _ in links:
        for station in (source, target):
            if station not in ids:
                ids.append(station)
    berths = berths or {}
    return NetworkSpec.model_validate(
        {
            "stations": [{"id": station, "berth_count": berths.get(station, 4)} for station in sorted(ids)],
            "links": [{"from": s, "to": t, "length": length} for s, t, length in links],
        }
    )


def random_strong_digraph(rng: np.random.Generator, max_nodes: int = 12, max_edges: int = 40) -> NetworkSpec:
    """Random strongly connected digraph with integer lengths: a Hamiltonian cycle plus random chords."""
    n = int(rng.integers(2, max_nodes + 1))
    names = [f"S{i:02d}" for i in range(n)]
    order = rng.permutation(n)
    edges = {(names[order[i]], names[order[(i + 1) % n]]) for i in range(n)}
    edge_cap = min(max_edges, n * (n - 1))
    candidates = [(a, b) for a in names for b in names if a != b and (a, b) not in edges]
    extra = int(rng.integers(0, edge_cap - len(edges) + 1))
    for index in rng.permutation(len(candidates))[:extra]:
        edges.add(candidates[index])
    links = [(a, b, int(rng.integers(1, 1000))) for a, b in sorted(edges)]
    graph = nx.DiGraph([(a, b) for a, b, _ in links])
    assert nx.is_strongly_connected(graph)
    return network_spec(links)


def scenario_from(data: dict) -> ScenarioFile:
    return ScenarioFile.model_validate(data)


def short_city(kind: str, heavy: float = 1800.0, drain: float = 1800.0, **management) -> ScenarioFile:
    """City scenario with shortened heavy phase and drain window."""
    data = city_scenario_data(kind)
    data["demand"]["heavy_duration"] = heavy
    data["run"]["drain_window"] = drain
    data["management"].update(management)
    return ScenarioFile.model_validate(data)


class FakeState:
    """StateSource backed by fixed snapshots; records every station read."""

    def __init__(self, snapshots: Dict[str, StationSnapshot]):
        self.snapshots = snapshots
        self.reads: List[str] = []

    def snapshot(self, station: str) -> StationSnapshot:
        self.reads.append(station)
        return self.snapshots[station]

    def idle_vehicle(self, station: str) -> Optional[int]:
        if self.snapshots[station].standing_empty <= 0:
            return None
        return sorted(self.snapshots).index(station) * 100


def snapshot(station: str, **fields) -> StationSnapshot:
    values = dict(standing_empty=0, free_berths=0, queue_len=0, inbound_empty=0, inbound_full=0, timestamp=0.0)
    values.update(fields)
    return StationSnapshot(station=station, **values)

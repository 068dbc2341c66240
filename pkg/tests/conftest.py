"""Shared pytest fixtures for all tests."""

from typing import Callable, List

import numpy as np
import pytest

from app.experiments.loader import load_scenario
from app.schemas.network import NetworkSpec
from app.schemas.scenario import ScenarioFile
from app.seed.city import city_network_spec
from app.sim.management import StationSnapshot
from app.sim.network import Network
from tests.factories import FakeState, network_spec, random_strong_digraph, scenario_from


@pytest.fixture
def two_station_loop() -> Network:
    """A<->B, 500 m each way."""
    return Network.from_spec(network_spec([("A", "B", 500), ("B", "A", 500)]))


@pytest.fixture
def three_cycle() -> Network:
    """Directed 3-cycle A->B 1 km, B->C 2 km, C->A 3 km."""
    return Network.from_spec(network_spec([("A", "B", 1000), ("B", "C", 2000), ("C", "A", 3000)]))


@pytest.fixture
def triangle() -> Network:
    """Bidirectional triangle: A-B 500 m, A-C 1000 m, B-C 700 m."""
    return Network.from_spec(
        network_spec(
            [
                ("A", "B", 500),
                ("B", "A", 500),
                ("A", "C", 1000),
                ("C", "A", 1000),
                ("B", "C", 700),
                ("C", "B", 700),
            ]
        )
    )


@pytest.fixture
def city() -> Network:
    return Network.from_spec(city_network_spec())


@pytest.fixture
def fake_state() -> Callable[..., FakeState]:
    def build(*snapshots: StationSnapshot) -> FakeState:
        return FakeState({item.station: item for item in snapshots})

    return build


@pytest.fixture
def strong_digraphs() -> List[NetworkSpec]:
    rng = np.random.default_rng(20240601)
    return [random_strong_digraph(rng) for _ in range(120)]


@pytest.fixture
def micro_idle_at_origin() -> ScenarioFile:
    return load_scenario("micro_idle_at_origin")


@pytest.fixture
def micro_call_from_neighbor() -> ScenarioFile:
    return load_scenario("micro_call_from_neighbor")


@pytest.fixture
def micro_full_station_expel() -> ScenarioFile:
    return load_scenario("micro_full_station_expel")


@pytest.fixture
def small_poisson() -> ScenarioFile:
    """Three-station loop with light Poisson demand, 30 min heavy phase and 30 min drain."""
    return scenario_from(
        {
            "name": "small_poisson",
            "network": {
                "stations": [
                    {"id": "A", "berth_count": 3},
                    {"id": "B", "berth_count": 3},
                    {"id": "C", "berth_count": 3},
                ],
                "links": [
                    {"from": "A", "to": "B", "length": 400},
                    {"from": "B", "to": "C", "length": 600},
                    {"from": "C", "to": "A", "length": 500},
                    {"from": "B", "to": "A", "length": 700},
                ],
            },
            "fleet": {"size": 4},
            "demand": {
                "phases": [
                    {
                        "name": "rush",
                        "start": 0,
                        "end": 1800,
                        "mean_interarrival_min": {"A": 1.5, "B": 3.0, "C": 2.0},
                    },
                    {
                        "name": "quiet",
                        "start": 1800,
                        "end": 3600,
                        "mean_interarrival_min": {"A": 15, "B": 15, "C": 15},
                        "heavy": False,
                    },
                ]
            },
            "management": {"horizon": 1.0},
            "run": {"drain_window": 1800, "seed": 7},
        }
    )

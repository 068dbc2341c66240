"""
The City benchmark network and its three transport tasks.

Twelve stations on two one-way loops (A-F and G-L) joined by four bridges.
Station I, next to the event area, sits on the right edge of the right loop
and has extra berths. Link lengths are an approximation; the reference layout
publishes no geometry.

Usage:
    python -m app.seed.city [output_dir]
"""

import sys
from pathlib import Path
from typing import Any, Dict, List, Union

import yaml

from app.schemas.demand import ScenarioKind
from app.schemas.network import NetworkSpec
from app.schemas.scenario import ScenarioFile

EVENT_STATION = "I"
BERTHS = 10
EVENT_STATION_BERTHS = 16
FLEET_SIZE = 100

STATIONS = list("ABCDEFGHIJKL")

LINKS = [
    # left loop
    ("A", "B", 600),
    ("B", "C", 500),
    ("C", "D", 700),
    ("D", "E", 600),
    ("E", "F", 500),
    ("F", "A", 700),
    # right loop
    ("G", "H", 500),
    ("H", "I", 600),
    ("I", "J", 600),
    ("J", "K", 500),
    ("K", "L", 700),
    ("L", "G", 600),
    # bridges
    ("C", "G", 800),
    ("L", "D", 800),
    ("K", "E", 900),
    ("F", "H", 900),
]

SCENARIO_FILES = {
    ScenarioKind.UNIFORM: "city_uniform",
    ScenarioKind.EVENT_INBOUND: "city_event_inbound",
    ScenarioKind.EVENT_OUTBOUND: "city_event_outbound",
}


def city_network_data() -> Dict[str, Any]:
    return {
        "stations": [
            {"id": station, "berth_count": EVENT_STATION_BERTHS if station == EVENT_STATION else BERTHS}
            for station in STATIONS
        ],
        "links": [{"from": source, "to": target, "length": length} for source, target, length in LINKS],
    }


def city_network_spec() -> NetworkSpec:
    return NetworkSpec.model_validate(city_network_data())


def city_scenario_data(kind: Union[ScenarioKind, str]) -> Dict[str, Any]:
    """Compact scenario document; demand phases are generated on load."""
    kind = ScenarioKind(kind)
    demand: Dict[str, Any] = {"kind": kind.value}
    if kind != ScenarioKind.UNIFORM:
        demand["event_station"] = EVENT_STATION
    return {
        "name": SCENARIO_FILES[kind],
        "network": city_network_data(),
        "fleet": {"size": FLEET_SIZE},
        "demand": demand,
        "management": {"horizon": "inf"},
        "run": {"drain_window": 7200, "seed": 1},
    }


def city_scenario(kind: Union[ScenarioKind, str]) -> ScenarioFile:
    return ScenarioFile.model_validate(city_scenario_data(kind))


def write_bundled_scenarios(directory: Union[str, Path]) -> List[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for kind, name in SCENARIO_FILES.items():
        path = directory / f"{name}.yaml"
        path.write_text(yaml.safe_dump(city_scenario_data(kind), sort_keys=False), encoding="utf-8")
        written.append(path)
    return written


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parents[2] / "scenarios"
    for path in write_bundled_scenarios(target):
        print(f"✓ Wrote {path}")

from typing import Optional

from pydantic import BaseModel, Field, model_validator

from app.schemas.demand import DemandSection, ScenarioKind
from app.schemas.fleet import FleetSection
from app.schemas.management import ManagementParams
from app.schemas.network import NetworkSpec

VEHICLES_PER_STATION = 3


class RunSection(BaseModel):
    heavy_end: Optional[float] = Field(default=None, ge=0)
    drain_window: float = Field(default=7200.0, gt=0)
    seed: int = Field(default=1, ge=0)


class ScenarioFile(BaseModel):
    """
    A complete, self-describing experiment.

    Validation fills every derived default (fleet size, generated demand phases,
    end of the heavy period) so a dumped scenario reloads to the same run.
    """

    name: str = Field(default="scenario", min_length=1)
    network: NetworkSpec
    fleet: FleetSection = Field(default_factory=FleetSection)
    demand: DemandSection = Field(default_factory=DemandSection)
    management: ManagementParams = Field(default_factory=ManagementParams)
    run: RunSection = Field(default_factory=RunSection)

    @model_validator(mode="after")
    def resolve(self) -> "ScenarioFile":
        station_ids = self.network.station_ids
        known = set(station_ids)

        if self.demand.kind is not None and not self.demand.phases:
            from app.sim.demand import DEFAULT_EVENT_STATION, build_scenario
            from app.sim.network import Network

            event_station = self.demand.event_station
            if event_station is None and self.demand.kind != ScenarioKind.UNIFORM:
                event_station = DEFAULT_EVENT_STATION
            phases = build_scenario(
                self.demand.kind,
                Network.from_spec(self.network),
                event_station=event_station,
                heavy_duration=self.demand.heavy_duration,
                tail=self.run.drain_window,
            )
            self.demand = self.demand.model_copy(
                update={"phases": phases, "event_station": event_station}
            )

        names = [phase.name for phase in self.demand.phases]
        if len(set(names)) != len(names):
            raise ValueError(f"demand phase names must be unique, got {names}")
        for phase in self.demand.phases:
            _check_known(known, phase.mean_interarrival_min, f"phase {phase.name!r} origin")
            for origin, row in (phase.destination_weights or {}).items():
                _check_known(known, [origin], f"phase {phase.name!r} weight origin")
                _check_known(known, row, f"phase {phase.name!r} destination")
            if phase.group_sizes.max_size > self.fleet.capacity:
                raise ValueError(
                    f"phase {phase.name!r} draws groups of {phase.group_sizes.max_size}, "
                    f"vehicle capacity is {self.fleet.capacity}"
                )
        for order in self.demand.orders:
            _check_known(known, [order.origin, order.destination], "scripted order station")
            if order.size > self.fleet.capacity:
                raise ValueError(f"scripted order of {order.size} exceeds capacity {self.fleet.capacity}")

        if self.fleet.size is None:
            self.fleet = self.fleet.model_copy(
                update={"size": VEHICLES_PER_STATION * len(station_ids)}
            )
        if self.fleet.size > self.network.total_berths:
            raise ValueError(
                f"fleet of {self.fleet.size} does not fit {self.network.total_berths} berths"
            )
        if self.fleet.placement is not None:
            _check_known(known, self.fleet.placement, "fleet placement station")
            berths = {station.id: station.berth_count for station in self.network.stations}
            for station, count in self.fleet.placement.items():
                if count > berths[station]:
                    raise ValueError(f"placement puts {count} vehicles on {berths[station]} berths at {station!r}")
            if sum(self.fleet.placement.values()) != self.fleet.size:
                raise ValueError("fleet placement counts must add up to fleet size")

        if self.run.heavy_end is None:
            self.run = self.run.model_copy(update={"heavy_end": self.default_heavy_end()})
        return self

    def default_heavy_end(self) -> float:
        heavy = [phase.end for phase in self.demand.phases if phase.heavy]
        if heavy:
            return max(heavy)
        if self.demand.orders:
            return max(order.time for order in self.demand.orders)
        return 0.0

    @property
    def end_of_run(self) -> float:
        return self.run.heavy_end + self.run.drain_window


def _check_known(known: set, stations, what: str) -> None:
    for station in stations:
        if station not in known:
            raise ValueError(f"{what} {station!r} is not a network station")

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

PROBABILITY_TOLERANCE = 1e-9


class GroupSizeDistribution(BaseModel):
    """Probabilities of 1-, 2-, 3- and 4-passenger groups."""

    p1: float = Field(default=0.25, ge=0)
    p2: float = Field(default=0.25, ge=0)
    p3: float = Field(default=0.25, ge=0)
    p4: float = Field(default=0.25, ge=0)

    @model_validator(mode="after")
    def check_total(self) -> "GroupSizeDistribution":
        total = self.p1 + self.p2 + self.p3 + self.p4
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError(f"group size probabilities sum to {total}, expected 1")
        return self

    @property
    def probabilities(self) -> Tuple[float, float, float, float]:
        return (self.p1, self.p2, self.p3, self.p4)

    @property
    def mean(self) -> float:
        return sum(size * p for size, p in enumerate(self.probabilities, start=1))

    @property
    def max_size(self) -> int:
        return max(size for size, p in enumerate(self.probabilities, start=1) if p > 0)

    @classmethod
    def uniform(cls) -> "GroupSizeDistribution":
        return cls()

    @classmethod
    def event_inbound(cls) -> "GroupSizeDistribution":
        return cls(p1=0.10, p2=0.20, p3=0.40, p4=0.30)

    @classmethod
    def event_outbound(cls) -> "GroupSizeDistribution":
        return cls(p1=0.05, p2=0.05, p3=0.30, p4=0.60)


class DemandPhase(BaseModel):
    """
    One family of independent Poisson order streams.

    Every station listed in ``mean_interarrival_min`` emits orders between
    ``start`` and ``end`` (seconds). Phases may overlap; overlapping streams at
    the same station superpose. ``destination_weights`` maps origin to a row of
    destination weights; a missing row (or a missing mapping) means uniform over
    every other station. ``heavy`` phases define the end of the heavy period used
    by the Rest metric.
    """

    name: str = Field(min_length=1)
    start: float = Field(default=0.0, ge=0)
    end: float
    mean_interarrival_min: Dict[str, float]
    destination_weights: Optional[Dict[str, Dict[str, float]]] = None
    group_sizes: GroupSizeDistribution = Field(default_factory=GroupSizeDistribution)
    heavy: bool = True

    @field_validator("mean_interarrival_min")
    @classmethod
    def check_means(cls, value: Dict[str, float]) -> Dict[str, float]:
        for station, mean in value.items():
            if not mean > 0:
                raise ValueError(f"mean inter-arrival at {station!r} must be positive, got {mean}")
        return value

    @model_validator(mode="after")
    def check_window_and_weights(self) -> "DemandPhase":
        if not self.start < self.end:
            raise ValueError(f"phase {self.name!r}: start {self.start} must precede end {self.end}")
        for origin, row in (self.destination_weights or {}).items():
            if row.get(origin, 0.0) != 0.0:
                raise ValueError(f"phase {self.name!r}: origin {origin!r} has nonzero self-weight")
            if any(weight < 0 for weight in row.values()):
                raise ValueError(f"phase {self.name!r}: negative destination weight from {origin!r}")
            if not sum(row.values()) > 0:
                raise ValueError(f"phase {self.name!r}: destination row of {origin!r} sums to zero")
        return self

    def destination_row(self, origin: str, station_ids: List[str]) -> Dict[str, float]:
        """Destination weights for ``origin``, uniform over the others if unspecified."""
        rows = self.destination_weights or {}
        if origin in rows:
            return dict(rows[origin])
        return {station: 1.0 for station in station_ids if station != origin}


class ScriptedOrder(BaseModel):
    origin: str
    destination: str
    size: int = Field(default=1, ge=1)
    time: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def check_distinct(self) -> "ScriptedOrder":
        if self.origin == self.destination:
            raise ValueError(f"scripted order from {self.origin!r} to itself")
        return self


class ScenarioKind(str, Enum):
    UNIFORM = "uniform"
    EVENT_INBOUND = "event_inbound"
    EVENT_OUTBOUND = "event_outbound"


class DemandSection(BaseModel):
    """
    Demand of a scenario.

    Either explicit ``phases`` / ``orders``, or a named ``kind`` whose phases are
    generated for ``event_station`` when the file is validated.
    """

    kind: Optional[ScenarioKind] = None
    event_station: Optional[str] = None
    heavy_duration: float = Field(default=7200.0, gt=0)
    phases: List[DemandPhase] = Field(default_factory=list)
    orders: List[ScriptedOrder] = Field(default_factory=list)

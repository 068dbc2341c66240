"""Exception hierarchy for the simulator."""

from typing import Optional


class SimulationError(Exception):
    """Base class for every error raised by the simulator."""


# Network

class NetworkError(SimulationError, ValueError):
    """Invalid topology or invalid query against it."""


class UnknownStation(NetworkError):
    """A station id that the network does not declare."""

    def __init__(self, station: str):
        super().__init__(f"Unknown station: {station!r}")
        self.station = station


class UnreachablePair(NetworkError):
    """Some ordered station pair has no directed path."""

    def __init__(self, source: str, target: str):
        super().__init__(f"No directed path from {source!r} to {target!r}")
        self.source = source
        self.target = target


class SameStation(NetworkError):
    """Origin and destination coincide where they must differ."""

    def __init__(self, station: str):
        super().__init__(f"Origin and destination are both {station!r}")
        self.station = station


class NegativeHorizon(NetworkError):
    """Horizon below zero."""

    def __init__(self, horizon: float):
        super().__init__(f"Horizon must be nonnegative, got {horizon}")
        self.horizon = horizon


# Demand

class DemandError(SimulationError, ValueError):
    """Invalid demand parameters."""


class NonPositiveMean(DemandError):
    def __init__(self, mean: float):
        super().__init__(f"Mean inter-arrival time must be positive, got {mean}")
        self.mean = mean


class AllZeroWeights(DemandError):
    def __init__(self, origin: str):
        super().__init__(f"No destination with positive weight from {origin!r}")
        self.origin = origin


class UnknownEventStation(DemandError):
    def __init__(self, station: Optional[str]):
        super().__init__(f"Event station {station!r} is not part of the network")
        self.station = station


# Engine

class EngineError(SimulationError):
    """Illegal engine transition or broken invariant."""


class VehicleNotIdle(EngineError, ValueError):
    def __init__(self, vehicle_id: int, state: str):
        super().__init__(f"Vehicle {vehicle_id} is {state}, not idle at a berth")
        self.vehicle_id = vehicle_id


class DeadlockDetected(EngineError):
    """Orders are queued but no vehicle can ever serve them."""


class AuditError(EngineError, AssertionError):
    """A conservation or occupancy invariant does not hold."""


class LocalityViolation(EngineError, AssertionError):
    """A decision touched a station outside the issuer's horizon."""


# Metrics

class MetricsError(SimulationError, ValueError):
    """Inconsistent metric input."""


class NegativeWait(MetricsError):
    def __init__(self, order_id: int, wait: float):
        super().__init__(f"Order {order_id} boarded {-wait:.6f}s before it was created")
        self.order_id = order_id
        self.wait = wait


class TimeRegression(MetricsError):
    def __init__(self, station: str, previous: float, current: float):
        super().__init__(
            f"Queue observation for {station!r} went back in time: {current} < {previous}"
        )
        self.station = station


# Scenario files

class ScenarioError(SimulationError, ValueError):
    """Scenario file could not be used."""


class ScenarioParseError(ScenarioError):
    def __init__(self, source: str, message: str, line: Optional[int] = None):
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")
        self.source = source
        self.line = line


class ScenarioValidationError(ScenarioError):
    def __init__(self, source: str, field: str, message: str, line: Optional[int] = None):
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {field}: {message}")
        self.source = source
        self.field = field
        self.line = line

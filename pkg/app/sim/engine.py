"""
Deterministic discrete-event core.

One run owns its clock, event queue, stations, vehicles, management agents and
metrics. Vehicles move at constant speed along shortest paths; links have no
capacity limit. A vehicle that finds its destination full waits off-berth in a
FIFO holding queue until a berth frees.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Deque, Dict, List, Optional, Tuple, Union

from app.core.config import get_settings
from app.core.errors import AuditError, DeadlockDetected, EngineError, SameStation, VehicleNotIdle
from app.schemas.demand import ScriptedOrder
from app.schemas.management import ManagementParams, format_horizon
from app.schemas.metrics import MetricsReport
from app.schemas.scenario import ScenarioFile
from app.sim.demand import OrderStream, TransitOrder, build_streams
from app.sim.events import EventKind, EventQueue
from app.sim.management import (
    Dispatch,
    DispatchReason,
    ManagementModule,
    StationSnapshot,
    adapt_horizon,
)
from app.sim.metrics import NETWORK_SCOPE, MetricsAccumulator
from app.sim.network import LinkDescriptor, Network, quantize, route
from app.sim.trace import TraceWriter

logger = logging.getLogger(__name__)

TIME_EPSILON = 1e-9


class VehicleState(str, Enum):
    IDLE = "idle"
    BOARDING = "boarding"
    ALIGHTING = "alighting"
    EN_ROUTE = "en_route"
    HOLDING = "holding"


AT_BERTH = (VehicleState.IDLE, VehicleState.BOARDING, VehicleState.ALIGHTING)


@dataclass(eq=False)
class Vehicle:
    id: int
    capacity: int
    station: str
    state: VehicleState = VehicleState.IDLE
    occupied: bool = False
    order: Optional[TransitOrder] = None
    idle_since: float = 0.0
    depart_time: Optional[float] = None
    path: Tuple[LinkDescriptor, ...] = ()
    dispatch_reason: Optional[DispatchReason] = None


@dataclass(eq=False)
class StationState:
    id: str
    berth_count: int
    occupied: int = 0
    queue: Deque[TransitOrder] = field(default_factory=deque)
    idle: List[Vehicle] = field(default_factory=list)
    holding: Deque[Vehicle] = field(default_factory=deque)
    inbound_empty: int = 0
    inbound_full: int = 0

    @property
    def free_berths(self) -> int:
        return self.berth_count - self.occupied

    def snapshot(self, now: float) -> StationSnapshot:
        return StationSnapshot(
            station=self.id,
            standing_empty=len(self.idle),
            free_berths=self.free_berths,
            queue_len=len(self.queue),
            inbound_empty=self.inbound_empty,
            inbound_full=self.inbound_full,
            timestamp=now,
        )


@dataclass
class RunResult:
    report: MetricsReport
    metrics: MetricsAccumulator
    dispatches: List[Tuple[float, Dispatch]]
    horizon_trace: List[Tuple[float, Optional[float]]]
    queue_samples: List[Tuple[float, int]]
    events: int

    def report_for(self, scope: str) -> MetricsReport:
        return self.report if scope == NETWORK_SCOPE else self.metrics.finalize(scope)


class Simulation:
    """
    A single simulation run.

    Args:
        scenario: Validated scenario
        params: Management parameters; defaults to the scenario's
        seed: Master seed; defaults to the scenario's
        network: Topology override, e.g. a rescaled copy
        trace: Optional event trace writer
        audit: Check invariants after every event; defaults to ``Settings.AUDIT``
    """

    def __init__(
        self,
        scenario: ScenarioFile,
        params: Optional[ManagementParams] = None,
        seed: Optional[int] = None,
        *,
        network: Optional[Network] = None,
        trace: Optional[TraceWriter] = None,
        audit: Optional[bool] = None,
    ):
        self.scenario = scenario
        self.params = params or scenario.management
        self.seed = scenario.run.seed if seed is None else seed
        self.network = network or Network.from_spec(scenario.network)
        self.distances = self.network.distances
        self.trace = trace
        self.audit_enabled = get_settings().AUDIT if audit is None else audit

        fleet = scenario.fleet
        self.speed = fleet.speed
        self.boarding_time = fleet.boarding_time
        self.alighting_time = fleet.alighting_time
        self.heavy_end = scenario.run.heavy_end
        self.end_of_run = scenario.end_of_run

        self.now = 0.0
        self.events = EventQueue()
        self.stations: Dict[str, StationState] = {
            station_id: StationState(station_id, self.network.berth_counts[station_id])
            for station_id in self.network.station_ids
        }
        self.vehicles: List[Vehicle] = []
        self.management = ManagementModule(self.distances, self.params, self)
        self.metrics = MetricsAccumulator(
            self.network.station_ids,
            self.heavy_end,
            self.end_of_run,
            scenario=scenario.name,
            seed=self.seed,
            horizon=self.params.horizon,
            fleet_size=fleet.size,
        )
        self.dispatch_log: List[Tuple[float, Dispatch]] = []
        self.horizon_trace: List[Tuple[float, Optional[float]]] = [(0.0, self.params.horizon)]
        self.queue_samples: List[Tuple[float, int]] = []
        self.delivered = 0
        self.processed = 0
        self._next_order_id = 0
        self._routes: Dict[Tuple[str, str], Tuple[LinkDescriptor, ...]] = {}
        self._next_balance = self.params.balance_period
        adaptive = self.params.adaptive
        self._next_adapt = adaptive.period if adaptive is not None else None
        self._period_max = 0
        self._handlers = {
            EventKind.ORDER_ARRIVAL: self._on_order_arrival,
            EventKind.VEHICLE_ARRIVAL: self._on_vehicle_arrival,
            EventKind.BOARDING_COMPLETE: self._on_boarding_complete,
            EventKind.ALIGHTING_COMPLETE: self._on_alighting_complete,
            EventKind.MANAGEMENT_TICK: self._on_tick,
            EventKind.PHASE_CHANGE: self._on_phase_change,
        }

        self._place_fleet(fleet.size, fleet.capacity, fleet.placement)
        self._schedule()

    # setup

    def _place_fleet(self, size: int, capacity: int, placement: Optional[Dict[str, int]]) -> None:
        if placement is not None:
            for station_id in self.network.station_ids:
                for _ in range(placement.get(station_id, 0)):
                    self._park_new(station_id, capacity)
            return
        while len(self.vehicles) < size:
            progressed = False
            for station in self.stations.values():
                if len(self.vehicles) == size:
                    break
                if station.free_berths > 0:
                    self._park_new(station.id, capacity)
                    progressed = True
            if not progressed:
                raise EngineError(f"fleet of {size} does not fit the network's berths")

    def _park_new(self, station_id: str, capacity: int) -> None:
        vehicle = Vehicle(id=len(self.vehicles), capacity=capacity, station=station_id)
        station = self.stations[station_id]
        station.occupied += 1
        station.idle.append(vehicle)
        self.vehicles.append(vehicle)

    def _schedule(self) -> None:
        demand = self.scenario.demand
        for stream in build_streams(demand.phases, self.network.station_ids, self.seed):
            first = stream.first_arrival()
            if first is not None:
                self.events.push(first, EventKind.ORDER_ARRIVAL, stream)
        for order in demand.orders:
            self.events.push(order.time, EventKind.ORDER_ARRIVAL, order)

        boundaries = {self.heavy_end}
        for phase in demand.phases:
            boundaries.update((phase.start, phase.end))
        for t in sorted(boundaries):
            if t <= self.end_of_run:
                self.events.push(t, EventKind.PHASE_CHANGE, t)

        if self.params.tick_period < self.end_of_run:
            self.events.push(self.params.tick_period, EventKind.MANAGEMENT_TICK)
        self.events.push(self.end_of_run, EventKind.END_OF_RUN)

    # main loop

    def run(self) -> RunResult:
        logger.info(
            "run %s: horizon=%s seed=%d fleet=%d until t=%.0f",
            self.scenario.name,
            format_horizon(self.params.horizon),
            self.seed,
            len(self.vehicles),
            self.end_of_run,
        )
        while True:
            event = self.events.pop()
            if event is None:
                raise DeadlockDetected(f"event queue exhausted at t={self.now} before the end of the run")
            if event.time < self.now:
                raise AuditError(f"{event.kind.name} at t={event.time} processed after t={self.now}")
            self.now = event.time
            self.processed += 1
            if event.kind == EventKind.END_OF_RUN:
                self._record(EventKind.END_OF_RUN.name)
                break
            self._handlers[event.kind](event.payload)
            if self.audit_enabled:
                self.audit()
        return self._finish()

    def _finish(self) -> RunResult:
        queued = [order for station in self.stations.values() for order in station.queue]
        self.metrics.messages = self.management.messages
        self.metrics.final_horizon = self.management.horizon
        self.metrics.close(self.now, queued)
        report = self.metrics.finalize(NETWORK_SCOPE)
        logger.info(
            "run %s: horizon=%s seed=%d awt=%.1fs aql=%.2f maxql=%d rest=%s",
            self.scenario.name,
            format_horizon(self.params.horizon),
            self.seed,
            report.awt_s,
            report.aql_groups,
            report.maxql_groups,
            ">2h" if report.rest_censored else f"{report.rest_min:.1f}min",
        )
        return RunResult(
            report=report,
            metrics=self.metrics,
            dispatches=self.dispatch_log,
            horizon_trace=self.horizon_trace,
            queue_samples=self.queue_samples,
            events=self.processed,
        )

    # state source for the management agents

    def snapshot(self, station: str) -> StationSnapshot:
        return self.stations[station].snapshot(self.now)

    def idle_vehicle(self, station: str) -> Optional[int]:
        vehicle = self._longest_idle(self.stations[station])
        return None if vehicle is None else vehicle.id

    # event handlers

    def _on_order_arrival(self, payload: Union[OrderStream, ScriptedOrder]) -> None:
        order_id = self._next_order_id
        self._next_order_id += 1
        if isinstance(payload, OrderStream):
            order = payload.draw(order_id, self.now)
            following = payload.next_arrival(self.now)
            if following is not None:
                self.events.push(following, EventKind.ORDER_ARRIVAL, payload)
        else:
            order = TransitOrder(
                id=order_id,
                origin=payload.origin,
                destination=payload.destination,
                size=payload.size,
                created_at=self.now,
            )
        self._record(EventKind.ORDER_ARRIVAL.name, order.origin, order=order.id)
        self.handle_order_arrival(order)

    def handle_order_arrival(self, order: TransitOrder) -> None:
        """Queue the order; board at once if a vehicle stands idle, otherwise call one."""
        self.metrics.order_created(order)
        station = self.stations[order.origin]
        station.queue.append(order)
        self._observe(station)
        if not self.vehicles:
            raise DeadlockDetected(f"order {order.id} queued at {order.origin} but the fleet is empty")
        vehicle = self._longest_idle(station)
        if vehicle is not None:
            station.idle.remove(vehicle)
            self._start_boarding(vehicle, station)
        else:
            self._call(station.id)

    def _on_boarding_complete(self, vehicle: Vehicle) -> None:
        order = vehicle.order
        self._record(EventKind.BOARDING_COMPLETE.name, order.origin, vehicle.id, order.id)
        self._depart(vehicle, order.origin, order.destination, occupied=True)

    def _on_vehicle_arrival(self, vehicle: Vehicle) -> None:
        self._record(
            EventKind.VEHICLE_ARRIVAL.name,
            vehicle.station,
            vehicle.id,
            vehicle.order.id if vehicle.order is not None else None,
        )
        self.handle_vehicle_arrival(vehicle, vehicle.station)

    def handle_vehicle_arrival(self, vehicle: Vehicle, station_id: str) -> None:
        """Take a berth if one is free and nobody is holding; otherwise hold and try to expel."""
        station = self.stations[station_id]
        if vehicle.occupied:
            station.inbound_full -= 1
        else:
            station.inbound_empty -= 1
        vehicle.path = ()
        vehicle.dispatch_reason = None
        if station.free_berths > 0 and not station.holding:
            self._land(vehicle, station)
        else:
            vehicle.state = VehicleState.HOLDING
            station.holding.append(vehicle)
            self._expel(station.id)

    def _on_alighting_complete(self, vehicle: Vehicle) -> None:
        self._record(EventKind.ALIGHTING_COMPLETE.name, vehicle.station, vehicle.id, vehicle.order.id)
        vehicle.occupied = False
        vehicle.order = None
        self.delivered += 1
        self._serve_or_idle(vehicle, self.stations[vehicle.station])

    def _on_tick(self, _payload=None) -> None:
        self._record(EventKind.MANAGEMENT_TICK.name)
        for station_id in self.network.station_ids:
            self._call(station_id)
        for station in self.stations.values():
            if station.holding:
                self._expel(station.id)
        if self.now >= self._next_balance - TIME_EPSILON:
            for dispatch in self.management.balance():
                self.execute(dispatch)
            self._next_balance += self.params.balance_period

        lengths = [len(station.queue) for station in self.stations.values()]
        self.queue_samples.append((self.now, sum(lengths)))
        self._period_max = max(self._period_max, max(lengths))
        adaptive = self.params.adaptive
        if adaptive is not None and self.now >= self._next_adapt - TIME_EPSILON:
            horizon = adapt_horizon(self._period_max, self.management.horizon, adaptive)
            if horizon != self.management.horizon:
                self.management.set_horizon(horizon)
                self.horizon_trace.append((self.now, horizon))
                logger.debug("t=%.0f horizon -> %s", self.now, format_horizon(horizon))
            self._period_max = 0
            self._next_adapt += adaptive.period

        following = self.now + self.params.tick_period
        if following < self.end_of_run:
            self.events.push(following, EventKind.MANAGEMENT_TICK)

    def _on_phase_change(self, boundary: float) -> None:
        self._record(EventKind.PHASE_CHANGE.name)
        logger.debug("t=%.0f phase boundary", boundary)
        if boundary == self.heavy_end:
            self.metrics.reach_heavy_end(self.now)

    # vehicle movement

    def dispatch_empty(self, vehicle: Vehicle, source: str, target: str) -> None:
        """
        Send an idle empty vehicle from ``source`` to ``target``.

        Raises:
            VehicleNotIdle: The vehicle is not idle at ``source``
            SameStation: ``source == target``
        """
        if vehicle.state != VehicleState.IDLE or vehicle.station != source:
            raise VehicleNotIdle(vehicle.id, f"{vehicle.state.value} at {vehicle.station}")
        if source == target:
            raise SameStation(source)
        self.stations[source].idle.remove(vehicle)
        self._depart(vehicle, source, target, occupied=False)

    def execute(self, dispatch: Dispatch) -> None:
        self.management.check_locality(dispatch)
        vehicle = self.vehicles[dispatch.vehicle_id]
        self.dispatch_empty(vehicle, dispatch.source, dispatch.target)
        vehicle.dispatch_reason = dispatch.reason
        self.dispatch_log.append((self.now, dispatch))
        self.metrics.count_dispatch(dispatch.reason)

    def _depart(self, vehicle: Vehicle, source: str, target: str, occupied: bool) -> None:
        path = self._route(source, target)
        self.stations[source].occupied -= 1
        destination = self.stations[target]
        if occupied:
            destination.inbound_full += 1
        else:
            destination.inbound_empty += 1
        vehicle.state = VehicleState.EN_ROUTE
        vehicle.station = target
        vehicle.occupied = occupied
        vehicle.path = path
        vehicle.depart_time = self.now
        travel = quantize(self.distances.distance(source, target) / self.speed)
        self.events.push(self.now + travel, EventKind.VEHICLE_ARRIVAL, vehicle)
        self._admit_holding(self.stations[source])

    def _route(self, source: str, target: str) -> Tuple[LinkDescriptor, ...]:
        key = (source, target)
        if key not in self._routes:
            self._routes[key] = tuple(route(self.network, source, target))
        return self._routes[key]

    def _land(self, vehicle: Vehicle, station: StationState) -> None:
        station.occupied += 1
        if vehicle.occupied:
            vehicle.state = VehicleState.ALIGHTING
            self.events.push(self.now + self.alighting_time, EventKind.ALIGHTING_COMPLETE, vehicle)
        else:
            self._serve_or_idle(vehicle, station)

    def _admit_holding(self, station: StationState) -> None:
        while station.free_berths > 0 and station.holding:
            self._land(station.holding.popleft(), station)

    def _serve_or_idle(self, vehicle: Vehicle, station: StationState) -> None:
        if station.queue:
            self._start_boarding(vehicle, station)
        else:
            vehicle.state = VehicleState.IDLE
            vehicle.idle_since = self.now
            station.idle.append(vehicle)

    def _start_boarding(self, vehicle: Vehicle, station: StationState) -> None:
        order = station.queue.popleft()
        self._observe(station)
        self.metrics.record_wait(order, self.now)
        vehicle.state = VehicleState.BOARDING
        vehicle.order = order
        self._record("BOARDING_START", station.id, vehicle.id, order.id)
        self.events.push(self.now + self.boarding_time, EventKind.BOARDING_COMPLETE, vehicle)

    @staticmethod
    def _longest_idle(station: StationState) -> Optional[Vehicle]:
        if not station.idle:
            return None
        return min(station.idle, key=lambda vehicle: (vehicle.idle_since, vehicle.id))

    # management triggers

    def _call(self, station_id: str) -> None:
        while True:
            dispatch = self.management.call_empty(station_id)
            if dispatch is None:
                return
            self.execute(dispatch)

    def _expel(self, station_id: str) -> bool:
        dispatch = self.management.expel(station_id)
        if dispatch is None:
            return False
        self.execute(dispatch)
        return True

    # bookkeeping

    def _observe(self, station: StationState) -> None:
        self.metrics.observe_queue(station.id, self.now, len(station.queue))

    def _record(
        self,
        kind: str,
        station: Optional[str] = None,
        vehicle: Optional[int] = None,
        order: Optional[int] = None,
    ) -> None:
        if self.trace is not None:
            self.trace.record(self.now, kind, station, vehicle, order)

    def audit(self) -> None:
        """
        Check conservation and occupancy invariants.

        Raises:
            AuditError: On the first violated invariant
        """
        at_berth = {station_id: 0 for station_id in self.stations}
        inbound = {station_id: [0, 0] for station_id in self.stations}
        riding = 0
        for vehicle in self.vehicles:
            station = self.stations[vehicle.station]
            if vehicle.state in AT_BERTH:
                at_berth[vehicle.station] += 1
            if vehicle.state == VehicleState.IDLE and vehicle not in station.idle:
                raise AuditError(f"vehicle {vehicle.id} idle but not listed at {station.id}")
            if vehicle.state == VehicleState.HOLDING and vehicle not in station.holding:
                raise AuditError(f"vehicle {vehicle.id} holding but not queued at {station.id}")
            if vehicle.state == VehicleState.EN_ROUTE:
                inbound[vehicle.station][1 if vehicle.occupied else 0] += 1
            if vehicle.order is not None:
                riding += 1

        listed = sum(len(s.idle) + len(s.holding) for s in self.stations.values())
        counted = sum(1 for v in self.vehicles if v.state in (VehicleState.IDLE, VehicleState.HOLDING))
        if listed != counted:
            raise AuditError(f"{listed} vehicles listed idle or holding, {counted} in those states")

        for station in self.stations.values():
            if station.occupied != at_berth[station.id]:
                raise AuditError(
                    f"{station.id}: {station.occupied} berths marked occupied, {at_berth[station.id]} vehicles at berth"
                )
            if not 0 <= station.occupied <= station.berth_count:
                raise AuditError(f"{station.id}: {station.occupied} of {station.berth_count} berths occupied")
            if [station.inbound_empty, station.inbound_full] != inbound[station.id]:
                raise AuditError(
                    f"{station.id}: inbound counters {station.inbound_empty}/{station.inbound_full}, "
                    f"en route {inbound[station.id][0]}/{inbound[station.id][1]}"
                )
            keys = [(order.created_at, order.id) for order in station.queue]
            if keys != sorted(keys):
                raise AuditError(f"{station.id}: queue out of FIFO order")

        queued = sum(len(station.queue) for station in self.stations.values())
        if self._next_order_id != queued + riding + self.delivered:
            raise AuditError(
                f"{self._next_order_id} orders generated, {queued} queued + {riding} riding "
                f"+ {self.delivered} delivered"
            )


def run(
    scenario: ScenarioFile,
    params: Optional[ManagementParams] = None,
    seed: Optional[int] = None,
    *,
    network: Optional[Network] = None,
    trace: Optional[TraceWriter] = None,
    audit: Optional[bool] = None,
) -> RunResult:
    """Simulate ``scenario`` from t=0 to the end of the drain window."""
    return Simulation(scenario, params, seed, network=network, trace=trace, audit=audit).run()

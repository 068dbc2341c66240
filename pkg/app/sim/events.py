import heapq
from dataclasses import dataclass
from enum import IntEnum
from typing import Any, List, Optional, Tuple


class EventKind(IntEnum):
    """Event kinds; the value is the tie-break rank among simultaneous events."""

    BOARDING_COMPLETE = 0
    ALIGHTING_COMPLETE = 1
    VEHICLE_ARRIVAL = 2
    ORDER_ARRIVAL = 3
    MANAGEMENT_TICK = 4
    PHASE_CHANGE = 5
    END_OF_RUN = 6


@dataclass(frozen=True)
class Event:
    time: float
    kind: EventKind
    payload: Any = None


class EventQueue:
    # processed by time, then kind rank, then insertion order
    def __init__(self):
        self._queue: List[Tuple[float, int, int, Event]] = []
        self._counter = 0

    def push(self, time: float, kind: EventKind, payload: Any = None) -> Event:
        event = Event(time, kind, payload)
        heapq.heappush(self._queue, (time, int(kind), self._counter, event))
        self._counter += 1
        return event

    def pop(self) -> Optional[Event]:
        if self._queue:
            return heapq.heappop(self._queue)[3]
        return None

    def is_empty(self) -> bool:
        return not self._queue

    def __len__(self) -> int:
        return len(self._queue)

    def __repr__(self) -> str:
        return f"EventQueue(size={len(self._queue)})"

"""In-process publish/subscribe bus.

One synchronization point for the whole stack: publishers may call from any
thread, every subscriber drains its own bounded FIFO queue (drop-oldest on
overflow), and payloads are immutable values once published. Also hosts the
velocity arbitration rule and the latched emergency stop.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Iterator

from .kinematics import Twist2D
from .messages import TOPICS, ActionKind, ActionRequest, Source, VelocityCommand

__all__ = [
    "Envelope", "SchemaError", "Bus", "Subscription",
    "arbitrate_velocity", "EstopLatch",
]

DEFAULT_QUEUE_DEPTH = 64


class SchemaError(TypeError):
    """Payload type does not match the topic registration."""


@dataclass(frozen=True)
class Envelope:
    topic: str
    seq: int
    stamp: float
    publisher: str
    payload: Any


class Subscription:
    """Bounded per-subscriber queue; oldest messages drop on overflow."""

    def __init__(self, topic: str, maxlen: int):
        self.topic = topic
        self._queue: deque[Envelope] = deque(maxlen=maxlen)
        self._lock = threading.Lock()

    def _push(self, env: Envelope) -> None:
        with self._lock:
            self._queue.append(env)

    def poll(self) -> Envelope | None:
        with self._lock:
            return self._queue.popleft() if self._queue else None

    def drain(self) -> list[Envelope]:
        with self._lock:
            items = list(self._queue)
            self._queue.clear()
        return items

    def latest(self) -> Envelope | None:
        """Drop everything but the newest message and return it."""
        with self._lock:
            if not self._queue:
                return None
            env = self._queue[-1]
            self._queue.clear()
        return env

    def __iter__(self) -> Iterator[Envelope]:
        while (env := self.poll()) is not None:
            yield env


class Bus:
    def __init__(self, topics: dict[str, type] | None = None,
                 queue_depth: int = DEFAULT_QUEUE_DEPTH):
        self._lock = threading.Lock()
        self._types: dict[str, type] = {}
        self._subs: dict[str, list[Subscription]] = {}
        self._taps: list[Callable[[Envelope], None]] = []
        self._seq: dict[tuple[str, str], int] = {}
        self._depth = queue_depth
        for name, payload_type in (topics or TOPICS).items():
            self.register(name, payload_type)

    def register(self, topic: str, payload_type: type) -> None:
        with self._lock:
            existing = self._types.get(topic)
            if existing is not None and existing is not payload_type:
                raise ValueError(f"topic {topic!r} already registered with {existing}")
            self._types[topic] = payload_type
            self._subs.setdefault(topic, [])

    def payload_type(self, topic: str) -> type:
        try:
            return self._types[topic]
        except KeyError:
            raise KeyError(f"unknown topic {topic!r}") from None

    def subscribe(self, topic: str, maxlen: int | None = None) -> Subscription:
        with self._lock:
            if topic not in self._types:
                raise KeyError(f"unknown topic {topic!r}")
            sub = Subscription(topic, maxlen or self._depth)
            self._subs[topic].append(sub)
        return sub

    def unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            subs = self._subs.get(sub.topic, [])
            if sub in subs:
                subs.remove(sub)

    def add_tap(self, callback: Callable[[Envelope], None]) -> None:
        """Observe every published envelope (recorder / gateway mirror)."""
        with self._lock:
            self._taps.append(callback)

    def remove_tap(self, callback: Callable[[Envelope], None]) -> None:
        with self._lock:
            if callback in self._taps:
                self._taps.remove(callback)

    def publish(self, topic: str, payload: Any, publisher: str = "anon",
                stamp: float = 0.0) -> int:
        with self._lock:
            expected = self._types.get(topic)
            if expected is None:
                raise KeyError(f"unknown topic {topic!r}")
            if not isinstance(payload, expected):
                raise SchemaError(
                    f"topic {topic!r} expects {expected.__name__}, "
                    f"got {type(payload).__name__}")
            key = (publisher, topic)
            seq = self._seq.get(key, 0) + 1
            self._seq[key] = seq
            env = Envelope(topic, seq, stamp, publisher, payload)
            subs = list(self._subs[topic])
            taps = list(self._taps)
        for sub in subs:
            sub._push(env)
        for tap in taps:
            tap(env)
        return seq


def arbitrate_velocity(manual: VelocityCommand | None,
                       autonomous: VelocityCommand | None,
                       estop_latched: bool,
                       now: float,
                       manual_timeout: float = 0.5,
                       auto_timeout: float = 0.5) -> Twist2D:
    """Pick the twist the base actually gets.

    The latched e-stop always wins with a zero twist; a fresh manual command
    beats a fresh autonomous one; anything stale counts as absent.
    """
    if estop_latched:
        return Twist2D(0.0, 0.0, 0.0)
    if manual is not None and now - manual.stamp <= manual_timeout:
        return manual.twist
    if autonomous is not None and now - autonomous.stamp <= auto_timeout:
        return autonomous.twist
    return Twist2D(0.0, 0.0, 0.0)


class EstopLatch:
    """Latched emergency stop; publishes a Stop action when set."""

    def __init__(self, bus: Bus | None = None):
        self._bus = bus
        self._latched = False

    @property
    def latched(self) -> bool:
        return self._latched

    def set(self, now: float = 0.0) -> bool:
        first = not self._latched
        self._latched = True
        if first and self._bus is not None:
            self._bus.publish(
                "actions",
                ActionRequest(ActionKind.STOP, Source.MANUAL),
                publisher="estop", stamp=now)
        return self._latched

    def reset(self) -> bool:
        self._latched = False
        return self._latched

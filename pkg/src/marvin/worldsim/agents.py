"""Scripted person agents: waypoint walking, postures, timed events."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..kinematics import Pose2D, wrap_angle

__all__ = ["ScriptEvent", "PersonAgent"]


@dataclass(frozen=True)
class ScriptEvent:
    t: float
    action: str                 # fall | posture | halt | resume
    posture: str | None = None
    yaw: float | None = None    # orientation to adopt (fall direction)


@dataclass
class PersonAgent:
    name: str
    pose: Pose2D
    speed: float = 0.8
    posture: str = "Standing"
    waypoints: list[tuple[float, float]] = field(default_factory=list)
    loop: bool = False
    events: list[ScriptEvent] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.speed < 0.0:
            raise ValueError("person speed must be >= 0")
        self._wp_index = 0
        self._walking = True
        self._fired: set[int] = set()

    def _apply_events(self, t: float) -> list[str]:
        fired = []
        for i, ev in enumerate(self.events):
            if i in self._fired or t < ev.t:
                continue
            self._fired.add(i)
            if ev.action == "fall":
                self.posture = "Laying"
                self._walking = False
                if ev.yaw is not None:
                    self.pose = Pose2D(self.pose.x, self.pose.y, ev.yaw)
            elif ev.action == "posture":
                self.posture = ev.posture or self.posture
                self._walking = self.posture == "Standing" and self._walking
            elif ev.action == "halt":
                self._walking = False
            elif ev.action == "resume":
                self._walking = True
                self.posture = "Standing"
            fired.append(ev.action)
        return fired

    def step(self, t: float, dt: float) -> list[str]:
        """Advance along waypoints and fire due script events."""
        fired = self._apply_events(t)
        if (not self._walking or self.posture != "Standing"
                or self._wp_index >= len(self.waypoints) or self.speed == 0.0):
            return fired
        remaining = self.speed * dt
        x, y = self.pose.x, self.pose.y
        yaw = self.pose.yaw
        while remaining > 1e-12 and self._wp_index < len(self.waypoints):
            wx, wy = self.waypoints[self._wp_index]
            dist = math.hypot(wx - x, wy - y)
            if dist <= remaining:
                x, y = wx, wy
                remaining -= dist
                self._wp_index += 1
                if self._wp_index >= len(self.waypoints) and self.loop:
                    self._wp_index = 0
            else:
                ux, uy = (wx - x) / dist, (wy - y) / dist
                x += ux * remaining
                y += uy * remaining
                yaw = math.atan2(uy, ux)
                remaining = 0.0
        if self._wp_index < len(self.waypoints):
            wx, wy = self.waypoints[self._wp_index]
            if math.hypot(wx - x, wy - y) > 1e-9:
                yaw = math.atan2(wy - y, wx - x)
        self.pose = Pose2D(x, y, wrap_angle(yaw))
        return fired

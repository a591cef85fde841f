"""Central task state machine.

Listens on the Actions topic, keeps exactly one task active, resolves POIs
to navigation goals, runs the help-confirmation protocol (ten-second
timeout) and orchestrates night assistance: lights on before the first
goal, reduced speed, lights off when the task ends.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import yaml

from .bus import Bus
from .kinematics import Pose2D
from .messages import (ActionKind, ActionRequest, Event, LightsRequest,
                       NavGoal, Source, VocalEvent)

__all__ = ["PoiRegistry", "TaskPhase", "TaskManager",
           "HELP_CONFIRM_TIMEOUT", "NIGHT_SPEED_CAP", "NIGHT_MONITOR_DWELL"]

HELP_CONFIRM_TIMEOUT = 10.0
NIGHT_SPEED_CAP = 0.5
NIGHT_MONITOR_DWELL = 10.0   # monitoring time at the night-assist goal


class PoiRegistry:
    """Named poses; names are lowercase-normalized and must include 'dock'."""

    def __init__(self, pois: dict[str, Pose2D]):
        normalized = {}
        for name, pose in pois.items():
            key = str(name).strip().lower()
            if key in normalized:
                raise ValueError(f"duplicate POI name {key!r}")
            normalized[key] = pose
        if "dock" not in normalized:
            raise ValueError("POI registry must include 'dock'")
        self._pois = normalized

    @classmethod
    def load(cls, path: str | Path) -> "PoiRegistry":
        data = yaml.safe_load(Path(path).read_text()) or {}
        return cls({name: Pose2D(float(p["x"]), float(p["y"]),
                                 float(p.get("yaw", 0.0)))
                    for name, p in data.items()})

    def resolve(self, name: str) -> Pose2D | None:
        return self._pois.get(str(name).strip().lower())

    def names(self) -> tuple[str, ...]:
        return tuple(self._pois)

    def __contains__(self, name: str) -> bool:
        return self.resolve(name) is not None


class TaskPhase(Enum):
    IDLE = "Idle"
    RUNNING = "Running"
    AWAIT_HELP_CONFIRM = "AwaitHelpConfirm"


@dataclass
class _State:
    active: ActionRequest | None = None
    phase: TaskPhase = TaskPhase.IDLE
    help_deadline: float | None = None
    prior_phase: TaskPhase = TaskPhase.IDLE
    night_arrived_at: float | None = None
    lights_owned: bool = False


class TaskManager:
    NODE = "taskmgr"

    def __init__(self, bus: Bus, pois: PoiRegistry,
                 help_timeout: float = HELP_CONFIRM_TIMEOUT,
                 night_speed_cap: float = NIGHT_SPEED_CAP,
                 night_dwell: float = NIGHT_MONITOR_DWELL):
        self.bus = bus
        self.pois = pois
        self.help_timeout = help_timeout
        self.night_speed_cap = night_speed_cap
        self.night_dwell = night_dwell
        self.state = _State()

    # -- inspection ------------------------------------------------------

    @property
    def phase(self) -> TaskPhase:
        return self.state.phase

    @property
    def active(self) -> ActionRequest | None:
        return self.state.active

    # -- helpers ---------------------------------------------------------

    def _event(self, name: str, now: float, **data) -> None:
        self.bus.publish("events", Event(name, now, data), self.NODE, now)

    def _say(self, text: str, now: float, kind: str = "response") -> None:
        self.bus.publish("vocal_events", VocalEvent(kind, text, now),
                         self.NODE, now)

    def _lights(self, on: bool, now: float) -> None:
        self.bus.publish("lights_request", LightsRequest(on), self.NODE, now)
        self._event("LightsOn" if on else "LightsOff", now)
        self.state.lights_owned = on

    def _clear_nav(self, now: float) -> None:
        self.bus.publish("nav_goal", NavGoal(Pose2D(), label="abort"),
                         self.NODE, now)

    def _abort_active(self, now: float) -> None:
        if self.state.active is None:
            return
        kind = self.state.active.kind
        if self.state.lights_owned:
            self._lights(False, now)
        self._clear_nav(now)
        self._event("TaskAborted", now, kind=kind.value)
        self.state.active = None
        self.state.phase = TaskPhase.IDLE
        self.state.night_arrived_at = None

    # -- the Actions topic -----------------------------------------------

    def on_action(self, msg: ActionRequest, now: float) -> None:
        if msg.kind is ActionKind.STOP:
            self._abort_active(now)
            self.state.phase = TaskPhase.IDLE
            self.state.help_deadline = None
            return
        if msg.kind is ActionKind.HELP_REQUEST:
            self._handle_help(msg, now)
            return

        kind, poi_name = msg.kind, msg.poi
        if kind is ActionKind.GO_AWAY:
            kind, poi_name = ActionKind.NAVIGATE_TO, "dock"
        if kind in (ActionKind.NAVIGATE_TO, ActionKind.NIGHT_ASSIST):
            pose = self.pois.resolve(poi_name or "")
            if pose is None:
                self._event("NotUnderstood", now, poi=poi_name or "")
                self._say(f"Sorry, I do not know the place {poi_name!r}.", now)
                return
        else:
            pose = None

        # newest request wins: abort before activate
        self._abort_active(now)
        self.state.active = msg
        self.state.phase = TaskPhase.RUNNING
        self._event("TaskActivated", now, kind=msg.kind.value,
                    poi=poi_name or "")

        if kind is ActionKind.NIGHT_ASSIST:
            self._lights(True, now)
            self.bus.publish("nav_goal",
                             NavGoal(pose, speed_cap=self.night_speed_cap,
                                     label="pose"),
                             self.NODE, now)
            self._event("GoalPublished", now, poi=poi_name or "",
                        x=pose.x, y=pose.y)
        elif kind is ActionKind.NAVIGATE_TO:
            self.bus.publish("nav_goal", NavGoal(pose, label="pose"),
                             self.NODE, now)
            self._event("GoalPublished", now, poi=poi_name or "",
                        x=pose.x, y=pose.y)
        elif kind is ActionKind.FOLLOW:
            self.bus.publish("nav_goal", NavGoal(Pose2D(), label="follow"),
                             self.NODE, now)

    # -- help confirmation protocol ---------------------------------------

    def _handle_help(self, msg: ActionRequest, now: float) -> None:
        if msg.source is Source.MONITOR:
            # a persisting fall never waits for confirmation
            self._dispatch_help(now, trigger="Monitor")
            return
        if self.state.phase is TaskPhase.AWAIT_HELP_CONFIRM:
            return
        self.state.prior_phase = self.state.phase
        self.state.phase = TaskPhase.AWAIT_HELP_CONFIRM
        self.state.help_deadline = now + self.help_timeout
        self._event("HelpPromptIssued", now, deadline=self.state.help_deadline)
        self._say("It sounds like you need help. Say yes to confirm or no "
                  "to cancel; otherwise I will call for help in ten seconds.",
                  now, kind="prompt")

    def _dispatch_help(self, now: float, trigger: str) -> None:
        self._event("HelpDispatched", now, trigger=trigger)
        self._say("Calling for help now.", now)
        if self.state.phase is TaskPhase.AWAIT_HELP_CONFIRM:
            self.state.phase = self.state.prior_phase
            self.state.help_deadline = None

    def on_help_reply(self, confirm: bool, now: float) -> None:
        if self.state.phase is not TaskPhase.AWAIT_HELP_CONFIRM:
            return
        if confirm:
            self._dispatch_help(now, trigger="Confirm")
        else:
            self._event("HelpDenied", now)
            self._say("Okay, no help call.", now)
            self.state.phase = self.state.prior_phase
            self.state.help_deadline = None

    # -- nav feedback and the clock ---------------------------------------

    def on_goal_reached(self, now: float) -> None:
        active = self.state.active
        if active is None or self.state.phase is not TaskPhase.RUNNING:
            return
        if active.kind is ActionKind.NIGHT_ASSIST:
            if self.state.night_arrived_at is None:
                self.state.night_arrived_at = now
                self._event("NightArrival", now)
        else:
            self._event("TaskCompleted", now, kind=active.kind.value)
            self.state.active = None
            self.state.phase = TaskPhase.IDLE

    def tick(self, now: float) -> None:
        if (self.state.phase is TaskPhase.AWAIT_HELP_CONFIRM
                and self.state.help_deadline is not None
                and now >= self.state.help_deadline):
            self._dispatch_help(now, trigger="Timeout")
        if (self.state.night_arrived_at is not None
                and now - self.state.night_arrived_at >= self.night_dwell):
            self._event("TaskCompleted", now, kind=ActionKind.NIGHT_ASSIST.value)
            if self.state.lights_owned:
                self._lights(False, now)
            self._clear_nav(now)
            self.state.active = None
            self.state.phase = TaskPhase.IDLE
            self.state.night_arrived_at = None

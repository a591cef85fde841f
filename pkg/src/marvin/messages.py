"""Typed payloads carried on the bus, and the topic registry.

Every topic name is declared once here together with its payload type; the
bus enforces the pairing and the gateway mirrors it 1:1 onto the wire.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .kinematics import Pose2D, Twist2D, WheelSpeeds
from .lowlayer import DevicePhase


class ActionKind(Enum):
    NAVIGATE_TO = "NavigateTo"
    FOLLOW = "Follow"
    GO_AWAY = "GoAway"
    NIGHT_ASSIST = "NightAssist"
    HELP_REQUEST = "HelpRequest"
    STOP = "Stop"


class Source(Enum):
    VOCAL = "Vocal"
    MANUAL = "Manual"
    MONITOR = "Monitor"
    AUTONOMOUS = "Autonomous"


@dataclass(frozen=True)
class ActionRequest:
    kind: ActionKind
    source: Source
    poi: str | None = None

    def __post_init__(self) -> None:
        needs_poi = self.kind in (ActionKind.NAVIGATE_TO, ActionKind.NIGHT_ASSIST)
        if needs_poi and not self.poi:
            raise ValueError(f"{self.kind.value} requires a POI name")


@dataclass(frozen=True)
class VelocityCommand:
    twist: Twist2D
    source: Source
    stamp: float


@dataclass(frozen=True)
class EstopCommand:
    latch: bool  # True -> set, False -> reset


@dataclass(frozen=True)
class DeviceRequest:
    target: str  # Deploy | Retract | TiltForward | TiltHome


@dataclass(frozen=True)
class LightsRequest:
    on: bool


@dataclass(frozen=True)
class HelpReply:
    confirm: bool  # True = Confirm, False = Deny


@dataclass(frozen=True)
class UtteranceFrameMsg:
    stamp: float
    energy: float
    token: str | None = None


@dataclass(frozen=True)
class VocalEvent:
    kind: str  # triggered | response | not_understood | prompt | warning
    text: str
    stamp: float


@dataclass(frozen=True)
class RobotTelemetry:
    stamp: float
    pose: Pose2D
    twist: Twist2D                 # achieved body twist
    commanded_twist: Twist2D       # post-arbitration, post-filter command
    wheel_speeds: WheelSpeeds
    device_linear: float
    device_tilt: float
    device_phase: DevicePhase
    lights_on: bool
    estop_latched: bool


@dataclass(frozen=True)
class LidarScanMsg:
    stamp: float
    angle_start: float
    angle_step: float
    max_range: float
    ranges: tuple[float, ...]


@dataclass(frozen=True)
class TrackState:
    track_id: int
    bbox: tuple[float, float, float, float]  # x1, y1, x2, y2 (px)
    hits: int
    age: int
    time_since_update: int
    pose_class: str = "Unknown"


@dataclass(frozen=True)
class TrackSet:
    stamp: float
    tracks: tuple[TrackState, ...]
    target_id: int | None


@dataclass(frozen=True)
class PersonGoalMsg:
    x: float
    y: float
    stamp: float


@dataclass(frozen=True)
class NavGoal:
    pose: Pose2D
    speed_cap: float | None = None
    label: str = ""


@dataclass(frozen=True)
class PlannedPathMsg:
    stamp: float
    points: tuple[tuple[float, float], ...]
    total_cost: float


@dataclass(frozen=True)
class GridMsg:
    stamp: float
    width: int
    height: int
    resolution: float
    origin: Pose2D
    cells: bytes  # row-major, 0 free / 100 occupied / 255 unknown


@dataclass(frozen=True)
class Event:
    name: str
    stamp: float
    data: dict = field(default_factory=dict)


# topic name -> payload type; the single source of truth for the wire too
TOPICS: dict[str, type] = {
    "actions": ActionRequest,
    "cmd_vel_manual": VelocityCommand,
    "cmd_vel_auto": VelocityCommand,
    "estop": EstopCommand,
    "device_request": DeviceRequest,
    "lights_request": LightsRequest,
    "help_reply": HelpReply,
    "utterance_frames": UtteranceFrameMsg,
    "vocal_events": VocalEvent,
    "telemetry": RobotTelemetry,
    "lidar": LidarScanMsg,
    "tracks": TrackSet,
    "person_goal": PersonGoalMsg,
    "nav_goal": NavGoal,
    "planned_path": PlannedPathMsg,
    "map_grid": GridMsg,
    "costmap_grid": GridMsg,
    "events": Event,
}

# topics that external clients are allowed to publish on
COMMAND_TOPICS: frozenset[str] = frozenset({
    "actions", "cmd_vel_manual", "estop", "device_request",
    "lights_request", "help_reply", "utterance_frames",
})

"""Scenario files: versioned header line, then a YAML body.

A scenario bundles the world, the robot start, POIs, person scripts,
scripted operator input (utterances, actions, e-stop, help replies) and the
assertions the run is judged against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..kinematics import Pose2D
from .agents import PersonAgent, ScriptEvent
from .grid import OccupancyGrid, WorldParseError

__all__ = ["Scenario", "ScenarioParseError", "load_scenario",
           "TimedUtterance", "TimedAction", "TimedEstop", "TimedHelpReply",
           "Assertion", "SCENARIO_MAGIC"]

SCENARIO_MAGIC = "MARVINSCN v1"


class ScenarioParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        suffix = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{suffix}")


@dataclass(frozen=True)
class TimedUtterance:
    t: float
    say: str            # first word is expected to be the trigger


@dataclass(frozen=True)
class TimedAction:
    t: float
    kind: str
    poi: str | None = None
    source: str = "Manual"


@dataclass(frozen=True)
class TimedEstop:
    t: float
    latch: bool


@dataclass(frozen=True)
class TimedHelpReply:
    t: float
    confirm: bool


@dataclass(frozen=True)
class Assertion:
    type: str
    params: dict


@dataclass
class Scenario:
    name: str
    grid: OccupancyGrid
    robot_start: Pose2D
    horizon: float
    pois: dict[str, Pose2D] = field(default_factory=dict)
    persons: list[PersonAgent] = field(default_factory=list)
    utterances: list[TimedUtterance] = field(default_factory=list)
    actions: list[TimedAction] = field(default_factory=list)
    estops: list[TimedEstop] = field(default_factory=list)
    help_replies: list[TimedHelpReply] = field(default_factory=list)
    assertions: list[Assertion] = field(default_factory=list)
    lidar_noise_sigma: float = 0.0


def _pose(node, context: str) -> Pose2D:
    try:
        return Pose2D(float(node["x"]), float(node["y"]),
                      float(node.get("yaw", 0.0)))
    except (KeyError, TypeError) as exc:
        raise ScenarioParseError(f"bad pose for {context}: {node!r}") from exc


def _persons(nodes) -> list[PersonAgent]:
    persons = []
    for node in nodes or []:
        events = [ScriptEvent(t=float(ev["t"]), action=str(ev["action"]),
                              posture=ev.get("posture"),
                              yaw=(float(ev["yaw"]) if "yaw" in ev else None))
                  for ev in node.get("events", [])]
        persons.append(PersonAgent(
            name=str(node.get("name", f"person{len(persons)}")),
            pose=_pose(node["start"], "person start"),
            speed=float(node.get("speed", 0.8)),
            posture=str(node.get("posture", "Standing")),
            waypoints=[(float(w["x"]), float(w["y"]))
                       for w in node.get("waypoints", [])],
            loop=bool(node.get("loop", False)),
            events=events,
        ))
    return persons


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    text = path.read_text()
    lines = text.splitlines()
    if not lines or lines[0].strip() != SCENARIO_MAGIC:
        raise ScenarioParseError(f"expected magic {SCENARIO_MAGIC!r}", line=1)
    try:
        body = yaml.safe_load("\n".join(lines[1:])) or {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 2 if mark else None
        raise ScenarioParseError(f"bad YAML body: {exc}", line=line) from None
    if not isinstance(body, dict):
        raise ScenarioParseError("scenario body must be a mapping")

    if "world" in body:
        world_path = (path.parent / str(body["world"])).resolve()
        try:
            grid = OccupancyGrid.from_ascii(world_path.read_text())
        except FileNotFoundError:
            raise ScenarioParseError(f"world file not found: {world_path}")
        except WorldParseError as exc:
            raise ScenarioParseError(f"world file {world_path}: {exc}")
    elif "world_inline" in body:
        grid = OccupancyGrid.from_ascii(str(body["world_inline"]))
    else:
        raise ScenarioParseError("scenario needs 'world' or 'world_inline'")

    robot = body.get("robot") or {}
    if "start" not in robot:
        raise ScenarioParseError("scenario needs robot.start")

    pois = {str(name).lower(): _pose(node, f"poi {name}")
            for name, node in (body.get("pois") or {}).items()}

    return Scenario(
        name=str(body.get("name", path.stem)),
        grid=grid,
        robot_start=_pose(robot["start"], "robot start"),
        horizon=float(body.get("horizon", 30.0)),
        pois=pois,
        persons=_persons(body.get("persons")),
        utterances=[TimedUtterance(float(u["t"]), str(u["say"]))
                    for u in body.get("utterances", [])],
        actions=[TimedAction(float(a["t"]), str(a["kind"]),
                             a.get("poi"), str(a.get("source", "Manual")))
                 for a in body.get("actions", [])],
        estops=[TimedEstop(float(e["t"]), bool(e.get("latch", True)))
                for e in body.get("estops", [])],
        help_replies=[TimedHelpReply(float(r["t"]), bool(r["confirm"]))
                      for r in body.get("help_replies", [])],
        assertions=[Assertion(str(a["type"]),
                              {k: v for k, v in a.items() if k != "type"})
                    for a in body.get("assertions", [])],
        lidar_noise_sigma=float(body.get("lidar_noise_sigma", 0.0)),
    )

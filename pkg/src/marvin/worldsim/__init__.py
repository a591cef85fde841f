"""Deterministic 2D home simulator."""

from .agents import PersonAgent, ScriptEvent
from .body import RobotBody
from .grid import FREE, OCCUPIED, UNKNOWN, OccupancyGrid, WorldParseError
from .lidar import InvalidStateError, LidarScan, LidarSpec, raycast_lidar
from .scenario import (Assertion, Scenario, ScenarioParseError, TimedAction,
                       TimedEstop, TimedHelpReply, TimedUtterance,
                       load_scenario)
from .world import World

__all__ = [
    "PersonAgent", "ScriptEvent", "RobotBody",
    "FREE", "OCCUPIED", "UNKNOWN", "OccupancyGrid", "WorldParseError",
    "InvalidStateError", "LidarScan", "LidarSpec", "raycast_lidar",
    "Assertion", "Scenario", "ScenarioParseError", "TimedAction",
    "TimedEstop", "TimedHelpReply", "TimedUtterance", "load_scenario",
    "World",
]

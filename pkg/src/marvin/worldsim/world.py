"""Deterministic home world: one stepper advances robot and people."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import MotionLimits, SimConfig
from ..kinematics import Pose2D, Twist2D
from .agents import PersonAgent
from .body import RobotBody
from .grid import OccupancyGrid
from .lidar import LidarScan, LidarSpec, raycast_lidar

__all__ = ["World"]


class World:
    def __init__(self, grid: OccupancyGrid, robot_start: Pose2D,
                 persons: list[PersonAgent] | None = None,
                 limits: MotionLimits | None = None,
                 sim: SimConfig | None = None,
                 seed: int = 0):
        self.grid = grid
        self.sim = sim or SimConfig()
        self.robot = RobotBody(robot_start, limits)
        self.persons = persons or []
        self.time = 0.0
        self.tick_count = 0
        self.rng = np.random.default_rng(seed)
        self.lidar_spec = LidarSpec(self.sim.lidar_beams,
                                    self.sim.lidar_max_range,
                                    self.sim.lidar_noise_sigma)
        if self.robot.footprint_collides(grid, robot_start):
            raise ValueError("robot start pose collides with the world")

    def command_robot(self, twist: Twist2D) -> None:
        self.robot.set_command(twist)

    def step(self, dt: float | None = None) -> list[str]:
        """One tick; returns the event names raised during it."""
        dt = dt if dt is not None else self.sim.tick
        if dt <= 0.0:
            raise ValueError("dt must be > 0")
        events: list[str] = []
        end_time = (self.tick_count + 1) * dt
        for person in self.persons:
            # script events due anywhere inside this tick take effect now
            events.extend(f"person:{person.name}:{name}"
                          for name in person.step(end_time, dt))
        blocked = self.robot.step(self.grid, dt)
        if blocked:
            events.append("collision")
        self.tick_count += 1
        self.time = self.tick_count * dt
        return events

    def scan_lidar(self) -> LidarScan:
        rng = self.rng if self.lidar_spec.noise_sigma > 0.0 else None
        return raycast_lidar(self.grid, self.robot.pose, self.lidar_spec,
                             rng=rng, stamp=self.time)

    def person(self, name: str) -> PersonAgent:
        for p in self.persons:
            if p.name == name:
                return p
        raise KeyError(f"no person named {name!r}")

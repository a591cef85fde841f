"""Robot body with acceleration slew and rectangular footprint collision."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..config import MotionLimits
from ..kinematics import Pose2D, Twist2D, integrate_odometry
from .grid import OccupancyGrid

__all__ = ["RobotBody"]


def _slew(current: float, target: float, max_delta: float) -> float:
    delta = target - current
    if delta > max_delta:
        return current + max_delta
    if delta < -max_delta:
        return current - max_delta
    return target


@dataclass(frozen=True)
class _Footprint:
    length: float
    width: float
    offsets: np.ndarray  # (N, 2) sample points in the body frame

    @classmethod
    def build(cls, length: float, width: float, spacing: float) -> "_Footprint":
        nx = max(2, int(math.ceil(length / spacing)) + 1)
        ny = max(2, int(math.ceil(width / spacing)) + 1)
        xs = np.linspace(-length / 2.0, length / 2.0, nx)
        ys = np.linspace(-width / 2.0, width / 2.0, ny)
        gx, gy = np.meshgrid(xs, ys)
        return cls(length, width, np.column_stack([gx.ravel(), gy.ravel()]))


class RobotBody:
    """Holonomic base: commanded twist is tracked per axis at a_max, the pose
    integrates exactly, and occupied cells block the footprint."""

    def __init__(self, pose: Pose2D, limits: MotionLimits | None = None,
                 footprint_spacing: float | None = None):
        self.limits = limits or MotionLimits()
        self.pose = pose
        self.twist = Twist2D()
        self.command = Twist2D()
        spacing = footprint_spacing or 0.035
        self._footprint = _Footprint.build(
            self.limits.footprint_length, self.limits.footprint_width, spacing)

    def set_command(self, twist: Twist2D) -> None:
        v = self.limits.v_max
        self.command = Twist2D(
            max(-v, min(v, twist.vx)),
            max(-v, min(v, twist.vy)),
            twist.yaw_rate,
        )

    def footprint_collides(self, grid: OccupancyGrid, pose: Pose2D) -> bool:
        c, s = math.cos(pose.yaw), math.sin(pose.yaw)
        off = self._footprint.offsets
        xs = pose.x + c * off[:, 0] - s * off[:, 1]
        ys = pose.y + s * off[:, 0] + c * off[:, 1]
        return bool(grid.points_occupied(xs, ys).any())

    def step(self, grid: OccupancyGrid, dt: float) -> bool:
        """Advance one tick; returns True when motion was blocked."""
        max_dv = self.limits.a_max * dt
        max_dw = self.limits.alpha_max * dt
        twist = Twist2D(
            _slew(self.twist.vx, self.command.vx, max_dv),
            _slew(self.twist.vy, self.command.vy, max_dv),
            _slew(self.twist.yaw_rate, self.command.yaw_rate, max_dw),
        )
        # try full motion first, then drop blocked axes one at a time
        candidates = (
            twist,
            Twist2D(twist.vx, 0.0, twist.yaw_rate),
            Twist2D(0.0, twist.vy, twist.yaw_rate),
            Twist2D(0.0, 0.0, twist.yaw_rate),
            Twist2D(0.0, 0.0, 0.0),
        )
        for i, candidate in enumerate(candidates):
            if candidate == Twist2D(0.0, 0.0, 0.0):
                new_pose = self.pose
            else:
                new_pose = integrate_odometry(self.pose, candidate, dt)
            if not self.footprint_collides(grid, new_pose):
                self.pose = new_pose
                self.twist = candidate
                return i > 0
        # even standing still collides (shouldn't happen from a valid start)
        self.twist = Twist2D(0.0, 0.0, 0.0)
        return True

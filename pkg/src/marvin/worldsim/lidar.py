"""Planar lidar over the occupancy grid, vectorized ray sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..kinematics import Pose2D
from .grid import OccupancyGrid

__all__ = ["LidarSpec", "LidarScan", "raycast_lidar", "InvalidStateError"]


class InvalidStateError(RuntimeError):
    """Sensor pose is inside an occupied cell."""


@dataclass(frozen=True)
class LidarSpec:
    beams: int = 360
    max_range: float = 8.0
    noise_sigma: float = 0.0


@dataclass(frozen=True)
class LidarScan:
    stamp: float
    angle_start: float          # world angle of beam 0 (robot yaw)
    angle_step: float
    max_range: float
    ranges: np.ndarray

    def __post_init__(self) -> None:
        r = np.asarray(self.ranges, dtype=float)
        object.__setattr__(self, "ranges", r)


def raycast_lidar(grid: OccupancyGrid, pose: Pose2D, spec: LidarSpec,
                  rng: np.random.Generator | None = None,
                  stamp: float = 0.0) -> LidarScan:
    """Trace spec.beams rays from the pose to the first occupied cell.

    Beam k points at pose.yaw + k * 2*pi/beams. Sampling step is half the
    grid resolution, so ranges are accurate to within one cell.
    """
    if grid.occupied_at(pose.x, pose.y):
        raise InvalidStateError(f"lidar pose ({pose.x:.2f}, {pose.y:.2f}) is occupied")
    step = grid.resolution * 0.5
    radii = np.arange(step, spec.max_range + step, step)     # (S,)
    angles = pose.yaw + np.arange(spec.beams) * (2.0 * math.pi / spec.beams)
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])  # (B, 2)
    xs = pose.x + dirs[:, 0:1] * radii[None, :]               # (B, S)
    ys = pose.y + dirs[:, 1:2] * radii[None, :]
    # beams that leave the map fly off to max range, they do not reflect
    hits = grid.points_occupied(xs.ravel(), ys.ravel(),
                                outside_occupied=False).reshape(xs.shape)
    first = hits.argmax(axis=1)                               # 0 when no hit
    any_hit = hits.any(axis=1)
    ranges = np.where(any_hit, radii[first], spec.max_range)
    if rng is not None and spec.noise_sigma > 0.0:
        ranges = ranges + rng.normal(0.0, spec.noise_sigma, size=ranges.shape)
        ranges = np.clip(ranges, step * 0.5, spec.max_range)
    return LidarScan(stamp=stamp, angle_start=pose.yaw,
                     angle_step=2.0 * math.pi / spec.beams,
                     max_range=spec.max_range, ranges=ranges)

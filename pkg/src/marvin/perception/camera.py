"""Pinhole camera mounted on the positioning device.

The camera looks along the robot +x axis, sits mount_forward ahead of the
chassis center, and rides the device: the linear axis raises it, the tilt
axis pitches it down toward the user. Camera frame: x right, y down,
z along the optical axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..config import CameraConfig

__all__ = ["CameraModel", "ProjectionError"]


class ProjectionError(ValueError):
    """Point cannot be projected / back-projected (behind lens, bad depth)."""


@dataclass(frozen=True)
class CameraModel:
    hfov_deg: float = 70.0
    width: int = 640
    height: int = 480
    max_depth: float = 6.0
    mount_forward: float = 0.15
    mount_height: float = 0.55     # lens height above floor, device retracted
    device_lift: float = 0.0       # linear axis extension (m)
    device_tilt_deg: float = 0.0   # pitch down (deg)

    @classmethod
    def from_config(cls, cfg: CameraConfig, lift: float = 0.0,
                    tilt_deg: float = 0.0) -> "CameraModel":
        return cls(cfg.hfov_deg, cfg.width, cfg.height, cfg.max_depth,
                   cfg.mount_forward, cfg.mount_base_height, lift, tilt_deg)

    @property
    def focal(self) -> float:
        return (self.width / 2.0) / math.tan(math.radians(self.hfov_deg) / 2.0)

    @property
    def cx(self) -> float:
        return self.width / 2.0

    @property
    def cy(self) -> float:
        return self.height / 2.0

    @property
    def lens_height(self) -> float:
        return self.mount_height + self.device_lift

    def _axes(self) -> np.ndarray:
        """Camera axes expressed in the robot frame (columns x_cam, y_cam, z_cam)."""
        d = math.radians(self.device_tilt_deg)
        c, s = math.cos(d), math.sin(d)
        x_cam = np.array([0.0, -1.0, 0.0])          # image right = robot -y
        z_cam = np.array([c, 0.0, -s])              # optical axis pitched down
        y_cam = np.cross(z_cam, x_cam)              # image down
        return np.column_stack([x_cam, y_cam, z_cam])

    def _origin(self) -> np.ndarray:
        return np.array([self.mount_forward, 0.0, self.lens_height])

    def project(self, point_robot: np.ndarray) -> tuple[float, float, float]:
        """Robot-frame 3D point -> (u, v, depth along the optical axis)."""
        rel = np.asarray(point_robot, dtype=float) - self._origin()
        p_cam = self._axes().T @ rel
        if p_cam[2] <= 1e-6:
            raise ProjectionError("point behind the camera")
        u = self.cx + self.focal * p_cam[0] / p_cam[2]
        v = self.cy + self.focal * p_cam[1] / p_cam[2]
        return float(u), float(v), float(p_cam[2])

    def back_project(self, u: float, v: float, depth: float) -> np.ndarray:
        """(pixel, aligned depth) -> robot-frame 3D point."""
        if not (0.0 < depth <= self.max_depth) or not math.isfinite(depth):
            raise ProjectionError(f"depth {depth!r} outside (0, {self.max_depth}]")
        p_cam = np.array([
            (u - self.cx) / self.focal * depth,
            (v - self.cy) / self.focal * depth,
            depth,
        ])
        return self._axes() @ p_cam + self._origin()

    def in_horizontal_fov(self, u: float) -> bool:
        return 0.0 <= u < self.width

"""Local costmap built from a lidar scan, with footprint inflation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..config import NavConfig
from ..kinematics import Pose2D
from ..worldsim.lidar import LidarScan

__all__ = ["Costmap", "build_costmap", "LETHAL"]

LETHAL = 254
MAX_INFLATED = 253


@dataclass
class Costmap:
    resolution: float
    origin: Pose2D                 # min corner of the window
    cells: np.ndarray              # uint8: 0..253 cost, 254 lethal

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    def cell_index(self, x: float, y: float) -> tuple[int, int] | None:
        col = int(math.floor((x - self.origin.x) / self.resolution))
        row = int(math.floor((y - self.origin.y) / self.resolution))
        if 0 <= row < self.height and 0 <= col < self.width:
            return row, col
        return None

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return (self.origin.x + (col + 0.5) * self.resolution,
                self.origin.y + (row + 0.5) * self.resolution)

    def is_lethal(self, row: int, col: int) -> bool:
        return self.cells[row, col] >= LETHAL

    def clamp_inside(self, x: float, y: float, margin_cells: int = 2) -> tuple[float, float]:
        """Nearest point inside the window (for goals beyond the local map)."""
        m = margin_cells * self.resolution
        cx = min(max(x, self.origin.x + m),
                 self.origin.x + self.width * self.resolution - m)
        cy = min(max(y, self.origin.y + m),
                 self.origin.y + self.height * self.resolution - m)
        return cx, cy


def inflate(lethal_mask: np.ndarray, resolution: float,
            inflation_radius: float) -> np.ndarray:
    """Costs decaying linearly from 253 at an obstacle to 0 at the radius."""
    cells = np.zeros(lethal_mask.shape, dtype=np.uint8)
    if lethal_mask.any():
        dist = ndimage.distance_transform_edt(~lethal_mask) * resolution
        with np.errstate(invalid="ignore"):
            decay = np.clip(1.0 - dist / inflation_radius, 0.0, 1.0)
        cells = np.rint(MAX_INFLATED * decay).astype(np.uint8)
        cells[lethal_mask] = LETHAL
    return cells


def build_costmap(scan: LidarScan, pose: Pose2D, config: NavConfig,
                  half_extent: float = 4.0,
                  resolution: float = 0.05) -> Costmap:
    """Rolling window centered on the robot; beam endpoints become lethal.

    The robot's own cell is never marked lethal, whatever the scan says.
    """
    size = int(round(2.0 * half_extent / resolution))
    origin = Pose2D(pose.x - half_extent, pose.y - half_extent, 0.0)
    lethal = np.zeros((size, size), dtype=bool)

    hit = scan.ranges < scan.max_range - 1e-9
    if hit.any():
        angles = scan.angle_start + np.arange(len(scan.ranges)) * scan.angle_step
        xs = pose.x + scan.ranges[hit] * np.cos(angles[hit])
        ys = pose.y + scan.ranges[hit] * np.sin(angles[hit])
        cols = np.floor((xs - origin.x) / resolution).astype(int)
        rows = np.floor((ys - origin.y) / resolution).astype(int)
        # stamp a 3x3 block per return: a single-scan curtain of lone cells
        # would leave corner gaps a grid planner could thread
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                r = rows + dr
                c = cols + dc
                ok = (r >= 0) & (r < size) & (c >= 0) & (c < size)
                lethal[r[ok], c[ok]] = True

    robot_cell = (int((pose.y - origin.y) / resolution),
                  int((pose.x - origin.x) / resolution))
    if 0 <= robot_cell[0] < size and 0 <= robot_cell[1] < size:
        lethal[robot_cell] = False

    cells = inflate(lethal, resolution, config.inflation_radius)
    cells[robot_cell] = min(cells[robot_cell], MAX_INFLATED)  # keep plannable
    return Costmap(resolution, origin, cells)

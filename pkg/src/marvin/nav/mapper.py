"""Log-odds occupancy mapping from lidar scans."""

from __future__ import annotations

import math

import numpy as np

from ..config import NavConfig
from ..kinematics import Pose2D
from ..worldsim.grid import FREE, OCCUPIED, UNKNOWN, OccupancyGrid
from ..worldsim.lidar import LidarScan

__all__ = ["MapperState", "mapper_update"]


class MapperState:
    """Clamped log-odds raster plus an update counter."""

    def __init__(self, width: int, height: int, resolution: float,
                 origin: Pose2D | None = None,
                 l_occ: float = 0.85, l_free: float = -0.4,
                 clamp: float = 4.0):
        self.resolution = resolution
        self.origin = origin or Pose2D()
        self.log_odds = np.zeros((height, width), dtype=np.float64)
        self.l_occ = l_occ
        self.l_free = l_free
        self.clamp = clamp
        self.updates = 0

    @classmethod
    def from_config(cls, width: int, height: int, resolution: float,
                    origin: Pose2D, nav: NavConfig) -> "MapperState":
        return cls(width, height, resolution, origin,
                   l_occ=nav.l_occ, l_free=nav.l_free, clamp=nav.logodds_clamp)

    @property
    def shape(self) -> tuple[int, int]:
        return self.log_odds.shape

    def _cells_of(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        cols = np.floor((xs - self.origin.x) / self.resolution).astype(np.int64)
        rows = np.floor((ys - self.origin.y) / self.resolution).astype(np.int64)
        h, w = self.log_odds.shape
        ok = (rows >= 0) & (rows < h) & (cols >= 0) & (cols < w)
        flat = rows * w + cols
        flat[~ok] = -1
        return flat

    def probabilities(self) -> np.ndarray:
        return 1.0 / (1.0 + np.exp(-self.log_odds))

    def to_occupancy(self, p_occupied: float = 0.65,
                     p_free: float = 0.35) -> OccupancyGrid:
        p = self.probabilities()
        cells = np.full(self.log_odds.shape, UNKNOWN, dtype=np.uint8)
        cells[p > p_occupied] = OCCUPIED
        cells[p < p_free] = FREE
        return OccupancyGrid(self.resolution, cells, self.origin)


def mapper_update(state: MapperState, pose: Pose2D,
                  scan: LidarScan) -> MapperState:
    """Fold one scan into the map.

    Each beam adds l_free once to every crossed cell short of its endpoint
    and l_occ to the endpoint cell when the beam actually hit something;
    values stay inside [-clamp, +clamp]. Updates are additive, so batches of
    beams commute.
    """
    n = len(scan.ranges)
    angles = scan.angle_start + np.arange(n) * scan.angle_step
    cos_a, sin_a = np.cos(angles), np.sin(angles)
    hit = scan.ranges < scan.max_range - 1e-9

    # endpoint cell per beam (only beams that hit)
    end_flat = np.full(n, -1, dtype=np.int64)
    if hit.any():
        ex = pose.x + scan.ranges[hit] * cos_a[hit]
        ey = pose.y + scan.ranges[hit] * sin_a[hit]
        end_flat[hit] = state._cells_of(ex, ey)

    # free cells: sample along each beam at half resolution
    step = state.resolution * 0.5
    max_samples = int(math.ceil(scan.max_range / step))
    radii = (np.arange(max_samples) + 0.5) * step                  # (S,)
    valid = radii[None, :] < scan.ranges[:, None]                   # (B, S)
    xs = pose.x + cos_a[:, None] * radii[None, :]
    ys = pose.y + sin_a[:, None] * radii[None, :]
    flat = state._cells_of(xs.ravel(), ys.ravel()).reshape(xs.shape)
    flat[~valid] = -1
    flat[flat == end_flat[:, None]] = -1           # endpoint is not free

    # one l_free per (beam, cell): dedupe oversampled cells within a beam
    beam_ids = np.repeat(np.arange(n, dtype=np.int64), max_samples)
    keys = beam_ids * (state.log_odds.size + 1) + flat.ravel()
    keys = keys[flat.ravel() >= 0]
    unique_keys = np.unique(keys)
    free_cells = unique_keys % (state.log_odds.size + 1)

    grid = state.log_odds.ravel()
    np.add.at(grid, free_cells, state.l_free)
    ends = end_flat[end_flat >= 0]
    np.add.at(grid, ends, state.l_occ)
    np.clip(grid, -state.clamp, state.clamp, out=grid)
    state.updates += 1
    return state

"""Occupancy raster shared by the simulator, the costmap and the mapper.

Cell values: 0 free, 100 occupied, 255 unknown. Row 0 sits at the map's
minimum y, so ASCII art files are stored top line = top of the map and
flipped on load. The origin is a translation (its yaw must be zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..kinematics import Pose2D

__all__ = ["FREE", "OCCUPIED", "UNKNOWN", "OccupancyGrid", "WorldParseError"]

FREE = 0
OCCUPIED = 100
UNKNOWN = 255

WORLD_MAGIC = "MARVINWORLD v1"


class WorldParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        suffix = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{suffix}")


@dataclass
class OccupancyGrid:
    resolution: float
    cells: np.ndarray                    # uint8, shape (height, width)
    origin: Pose2D = field(default_factory=Pose2D)

    def __post_init__(self) -> None:
        if self.resolution <= 0.0:
            raise ValueError("resolution must be > 0")
        if abs(self.origin.yaw) > 1e-9:
            raise ValueError("grid origin yaw must be zero")
        self.cells = np.asarray(self.cells, dtype=np.uint8)
        if self.cells.ndim != 2:
            raise ValueError("cells must be a 2D array")

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @classmethod
    def empty(cls, width: int, height: int, resolution: float,
              origin: Pose2D | None = None, fill: int = FREE) -> "OccupancyGrid":
        cells = np.full((height, width), fill, dtype=np.uint8)
        return cls(resolution, cells, origin or Pose2D())

    # -- coordinate transforms ------------------------------------------

    def cell_index(self, x: float, y: float) -> tuple[int, int] | None:
        col = int(math.floor((x - self.origin.x) / self.resolution))
        row = int(math.floor((y - self.origin.y) / self.resolution))
        if 0 <= row < self.height and 0 <= col < self.width:
            return row, col
        return None

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return (self.origin.x + (col + 0.5) * self.resolution,
                self.origin.y + (row + 0.5) * self.resolution)

    def occupied_at(self, x: float, y: float) -> bool:
        """Occupied cell test; anything outside the map counts as occupied."""
        idx = self.cell_index(x, y)
        if idx is None:
            return True
        return self.cells[idx] == OCCUPIED

    def points_occupied(self, xs: np.ndarray, ys: np.ndarray,
                        outside_occupied: bool = True) -> np.ndarray:
        """Vectorized occupied_at over parallel coordinate arrays."""
        cols = np.floor((xs - self.origin.x) / self.resolution).astype(int)
        rows = np.floor((ys - self.origin.y) / self.resolution).astype(int)
        outside = ((rows < 0) | (rows >= self.height) |
                   (cols < 0) | (cols >= self.width))
        rows_c = np.clip(rows, 0, self.height - 1)
        cols_c = np.clip(cols, 0, self.width - 1)
        hit = self.cells[rows_c, cols_c] == OCCUPIED
        hit[outside] = outside_occupied
        return hit

    # -- ASCII world files ----------------------------------------------

    @classmethod
    def from_ascii(cls, text: str) -> "OccupancyGrid":
        lines = text.splitlines()
        if not lines or lines[0].strip() != WORLD_MAGIC:
            raise WorldParseError(f"expected magic {WORLD_MAGIC!r}", line=1)
        resolution = None
        ox = oy = 0.0
        i = 1
        for i in range(1, len(lines)):
            line = lines[i].strip()
            if not line:
                continue
            if line.startswith(("#", ".")):
                break
            parts = line.split()
            if len(parts) < 2:
                raise WorldParseError(f"bad header entry {line!r}", line=i + 1)
            key = parts[0]
            if key == "resolution":
                resolution = float(parts[1])
            elif key == "origin":
                if len(parts) < 3:
                    raise WorldParseError("origin needs x and y", line=i + 1)
                ox, oy = float(parts[1]), float(parts[2])
            else:
                raise WorldParseError(f"unknown header key {key!r}", line=i + 1)
        else:
            raise WorldParseError("no grid rows found")
        if resolution is None:
            raise WorldParseError("missing resolution header")
        rows = []
        width = None
        for j in range(i, len(lines)):
            row = lines[j].rstrip()
            if not row:
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise WorldParseError(
                    f"ragged row: expected {width} chars, got {len(row)}", line=j + 1)
            try:
                rows.append([OCCUPIED if ch == "#" else FREE for ch in row])
            except KeyError:
                raise WorldParseError(f"bad cell char in row {row!r}", line=j + 1)
        cells = np.array(rows[::-1], dtype=np.uint8)  # first text line = top
        return cls(resolution, cells, Pose2D(ox, oy, 0.0))

    def to_ascii(self) -> str:
        out = [WORLD_MAGIC,
               f"resolution {self.resolution}",
               f"origin {self.origin.x} {self.origin.y}",
               ""]
        for row in self.cells[::-1]:
            out.append("".join("#" if c == OCCUPIED else "." for c in row))
        return "\n".join(out) + "\n"

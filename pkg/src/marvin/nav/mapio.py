"""Binary map files: text header, then raw row-major cell bytes."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..kinematics import Pose2D
from ..worldsim.grid import OccupancyGrid

__all__ = ["MAP_MAGIC", "MapFormatError", "save_grid", "load_grid",
           "save_map", "load_map"]

MAP_MAGIC = b"MARVINMAP v1"


class MapFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        suffix = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{suffix}")


def save_grid(grid: OccupancyGrid, path: str | Path) -> None:
    header = (
        MAP_MAGIC + b"\n"
        + f"width {grid.width}\n".encode()
        + f"height {grid.height}\n".encode()
        + f"resolution {float(grid.resolution)!r}\n".encode()
        + (f"origin {float(grid.origin.x)!r} {float(grid.origin.y)!r} "
           f"{float(grid.origin.yaw)!r}\n").encode()
        + b"data\n"
    )
    Path(path).write_bytes(header + grid.cells.tobytes())


def load_grid(path: str | Path) -> OccupancyGrid:
    blob = Path(path).read_bytes()
    lines = blob.split(b"\n", 6)
    if len(lines) < 7:
        raise MapFormatError("truncated header", line=len(lines))
    if lines[0] != MAP_MAGIC:
        raise MapFormatError(f"bad magic {lines[0][:20]!r}", line=1)
    fields = {}
    for i, key in ((1, b"width"), (2, b"height"), (3, b"resolution"),
                   (4, b"origin")):
        parts = lines[i].split()
        if not parts or parts[0] != key:
            raise MapFormatError(f"expected {key.decode()!r} header", line=i + 1)
        fields[key] = parts[1:]
    if lines[5] != b"data":
        raise MapFormatError("expected 'data' separator", line=6)
    try:
        width = int(fields[b"width"][0])
        height = int(fields[b"height"][0])
        resolution = float(fields[b"resolution"][0])
        ox, oy, oyaw = (float(v) for v in fields[b"origin"][:3])
    except (ValueError, IndexError) as exc:
        raise MapFormatError(f"bad header value: {exc}", line=5) from None
    payload = lines[6]
    if len(payload) != width * height:
        raise MapFormatError(
            f"payload is {len(payload)} bytes, expected {width * height}", line=7)
    cells = np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()
    return OccupancyGrid(resolution, cells, Pose2D(ox, oy, oyaw))


def save_map(state, path: str | Path, p_occupied: float = 0.65,
             p_free: float = 0.35) -> OccupancyGrid:
    """Threshold a mapper state and write it; returns the exported grid."""
    grid = state.to_occupancy(p_occupied, p_free)
    save_grid(grid, path)
    return grid


def load_map(path: str | Path) -> OccupancyGrid:
    return load_grid(path)

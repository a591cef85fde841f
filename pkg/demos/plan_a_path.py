"""Costmap from a lidar scan plus an optimal path through the doorway.

Run:  python3 demos/plan_a_path.py
"""

from pathlib import Path

from marvin.config import NavConfig
from marvin.kinematics import Pose2D
from marvin.nav import build_costmap, plan
from marvin.worldsim import LidarSpec, OccupancyGrid, raycast_lidar

root = Path(__file__).resolve().parent.parent
grid = OccupancyGrid.from_ascii((root / "worlds" / "two_room.world").read_text())
pose = Pose2D(1.0, 2.2, 0.0)

scan = raycast_lidar(grid, pose, LidarSpec(beams=360, max_range=8.0))
print(f"scan: {len(scan.ranges)} beams, "
      f"{(scan.ranges < 8.0).sum()} returns, "
      f"nearest wall {scan.ranges.min():.2f} m")

costmap = build_costmap(scan, pose, NavConfig())
path = plan(costmap, (pose.x, pose.y), (4.5, 2.0))
print(f"path to the far room: {len(path.points)} cells, "
      f"cost {path.total_cost:.3f} (pure distance would be "
      f"{((4.5 - 1.0) ** 2 + (2.0 - 2.2) ** 2) ** 0.5:.3f} m)")

# render world + path as ascii art
canvas = [["#" if grid.cells[r, c] else "." for c in range(grid.width)]
          for r in range(grid.height)]
for x, y in path.points:
    idx = grid.cell_index(x, y)
    if idx:
        canvas[idx[0]][idx[1]] = "o"
start = grid.cell_index(pose.x, pose.y)
goal = grid.cell_index(4.5, 2.0)
canvas[start[0]][start[1]] = "R"
canvas[goal[0]][goal[1]] = "G"
print()
for row in reversed(canvas):
    print("".join(row))

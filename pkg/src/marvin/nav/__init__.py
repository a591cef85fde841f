"""Navigation and mapping: costmap, optimal planning, following, mapping."""

from .costmap import LETHAL, Costmap, build_costmap, inflate
from .follower import (FollowController, FollowStatus, FollowerParams,
                       follow_path, follow_person, gaze_yaw_rate,
                       path_velocity)
from .mapio import (MAP_MAGIC, MapFormatError, load_grid, load_map, save_grid,
                    save_map)
from .mapper import MapperState, mapper_update
from .planner import NoPathError, PlannedPath, plan

__all__ = [
    "LETHAL", "Costmap", "build_costmap", "inflate",
    "FollowController", "FollowStatus", "FollowerParams", "follow_path",
    "follow_person", "gaze_yaw_rate", "path_velocity",
    "MAP_MAGIC", "MapFormatError", "load_grid", "load_map", "save_grid",
    "save_map", "MapperState", "mapper_update",
    "NoPathError", "PlannedPath", "plan",
]

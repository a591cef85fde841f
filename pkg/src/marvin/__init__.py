"""Assistive home robot software stack with a deterministic 2D simulator.

Subpackages mirror the system layers: kinematics and the low layer, the
message bus, task management, person perception, the vocal pipeline, the
world simulator, navigation/mapping, and the gateway service boundary.
"""

from .config import MarvinConfig, load_config
from .kinematics import (ChassisParams, Pose2D, Twist2D, WheelSpeeds,
                         clamp_to_octahedron, forward_kinematics,
                         integrate_odometry, inverse_kinematics)

__all__ = [
    "MarvinConfig", "load_config",
    "ChassisParams", "Pose2D", "Twist2D", "WheelSpeeds",
    "clamp_to_octahedron", "forward_kinematics", "integrate_odometry",
    "inverse_kinematics",
]

__version__ = "0.1.0"

"""Deterministic keypoint detector stand-in.

Projects posture-specific 17-joint skeleton templates of every visible
person agent through the pinhole model, with seeded Gaussian pixel noise.
Visibility needs the person inside the horizontal field of view, within
depth range, and an unobstructed straight line over the occupancy grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..kinematics import Pose2D
from .camera import CameraModel, ProjectionError

__all__ = ["JOINT_NAMES", "Keypoints17", "Detection", "skeleton_points",
           "synth_detect", "TEMPLATES"]

JOINT_NAMES: tuple[str, ...] = (
    "nose", "left_eye", "right_eye", "left_ear", "right_ear",
    "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
    "left_wrist", "right_wrist", "left_hip", "right_hip",
    "left_knee", "right_knee", "left_ankle", "right_ankle",
)

# joint -> (forward, left, up) in the person's local frame, metres;
# the walk posture carries fore-aft depth (arm swing, stride) so a side
# view still subtends a plausible silhouette
_STANDING = {
    "nose": (0.06, 0.0, 1.62),
    "left_eye": (0.07, 0.03, 1.66), "right_eye": (0.07, -0.03, 1.66),
    "left_ear": (0.02, 0.07, 1.62), "right_ear": (0.02, -0.07, 1.62),
    "left_shoulder": (0.0, 0.18, 1.45), "right_shoulder": (0.0, -0.18, 1.45),
    "left_elbow": (0.12, 0.22, 1.15), "right_elbow": (-0.10, -0.22, 1.15),
    "left_wrist": (0.19, 0.24, 0.88), "right_wrist": (-0.16, -0.24, 0.88),
    "left_hip": (0.0, 0.12, 0.95), "right_hip": (0.0, -0.12, 0.95),
    "left_knee": (0.11, 0.13, 0.50), "right_knee": (-0.07, -0.13, 0.50),
    "left_ankle": (0.16, 0.14, 0.08), "right_ankle": (-0.12, -0.14, 0.08),
}
_SITTING = {
    "nose": (0.08, 0.0, 1.18),
    "left_eye": (0.09, 0.03, 1.22), "right_eye": (0.09, -0.03, 1.22),
    "left_ear": (0.05, 0.07, 1.18), "right_ear": (0.05, -0.07, 1.18),
    "left_shoulder": (0.02, 0.18, 1.02), "right_shoulder": (0.02, -0.18, 1.02),
    "left_elbow": (0.05, 0.22, 0.78), "right_elbow": (0.05, -0.22, 0.78),
    "left_wrist": (0.18, 0.22, 0.62), "right_wrist": (0.18, -0.22, 0.62),
    "left_hip": (0.0, 0.15, 0.55), "right_hip": (0.0, -0.15, 0.55),
    "left_knee": (0.38, 0.15, 0.55), "right_knee": (0.38, -0.15, 0.55),
    "left_ankle": (0.40, 0.16, 0.12), "right_ankle": (0.40, -0.16, 0.12),
}
# body extended along local +x on the floor
_LAYING = {
    "nose": (0.80, 0.0, 0.22),
    "left_eye": (0.82, 0.03, 0.25), "right_eye": (0.82, -0.03, 0.25),
    "left_ear": (0.78, 0.07, 0.22), "right_ear": (0.78, -0.07, 0.22),
    "left_shoulder": (0.62, 0.18, 0.20), "right_shoulder": (0.62, -0.18, 0.20),
    "left_elbow": (0.42, 0.24, 0.16), "right_elbow": (0.42, -0.24, 0.16),
    "left_wrist": (0.25, 0.26, 0.14), "right_wrist": (0.25, -0.26, 0.14),
    "left_hip": (0.10, 0.12, 0.18), "right_hip": (0.10, -0.12, 0.18),
    "left_knee": (-0.28, 0.13, 0.14), "right_knee": (-0.28, -0.13, 0.14),
    "left_ankle": (-0.62, 0.14, 0.10), "right_ankle": (-0.62, -0.14, 0.10),
}
TEMPLATES = {"Standing": _STANDING, "Sitting": _SITTING, "Laying": _LAYING}

_TORSO = ("left_shoulder", "right_shoulder", "left_hip", "right_hip")


@dataclass(frozen=True)
class Keypoints17:
    """17 joints as an (17, 3) array of (u px, v px, confidence)."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.shape != (17, 3):
            raise ValueError(f"expected (17, 3) keypoints, got {pts.shape}")
        conf = pts[:, 2]
        if np.any((conf < 0.0) | (conf > 1.0)):
            raise ValueError("confidences must lie in [0, 1]")
        object.__setattr__(self, "points", pts)

    def joint(self, name: str) -> np.ndarray:
        return self.points[JOINT_NAMES.index(name)]

    def confident(self, threshold: float = 0.3) -> np.ndarray:
        return self.points[self.points[:, 2] >= threshold]

    def torso_centroid(self) -> tuple[float, float]:
        rows = [JOINT_NAMES.index(n) for n in _TORSO]
        uv = self.points[rows, :2].mean(axis=0)
        return float(uv[0]), float(uv[1])

    def bbox(self) -> tuple[float, float, float, float]:
        uv = self.points[:, :2]
        x1, y1 = uv.min(axis=0)
        x2, y2 = uv.max(axis=0)
        return float(x1), float(y1), float(x2), float(y2)


@dataclass(frozen=True)
class Detection:
    keypoints: Keypoints17
    depths: np.ndarray           # per-joint depth along the optical axis (m)
    true_posture: str            # generator label, for oracles only
    agent_index: int

    @property
    def torso_depth(self) -> float:
        rows = [JOINT_NAMES.index(n) for n in _TORSO]
        return float(np.mean(self.depths[rows]))


def skeleton_points(pose: Pose2D, posture: str) -> np.ndarray:
    """World-frame (17, 3) joint positions for a person at a planar pose."""
    template = TEMPLATES[posture]
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    pts = np.empty((17, 3))
    for i, name in enumerate(JOINT_NAMES):
        fx, fy, fz = template[name]
        pts[i] = (pose.x + c * fx - s * fy, pose.y + s * fx + c * fy, fz)
    return pts


def _line_of_sight(grid, a: tuple[float, float], b: tuple[float, float]) -> bool:
    """True when no occupied cell lies strictly between a and b."""
    ax, ay = a
    bx, by = b
    dist = math.hypot(bx - ax, by - ay)
    if dist < 1e-9:
        return True
    steps = max(2, int(dist / (grid.resolution * 0.5)))
    for k in range(1, steps):
        t = k / steps
        if grid.occupied_at(ax + (bx - ax) * t, ay + (by - ay) * t):
            return False
    return True


def synth_detect(persons, grid, robot_pose: Pose2D, camera: CameraModel,
                 rng: np.random.Generator | None = None,
                 noise_sigma: float = 2.0) -> list[Detection]:
    """Detections for every person agent visible from the robot.

    persons: iterable with .pose (world Pose2D) and .posture (str);
    grid: occupancy grid with .resolution and .occupied_at(x, y).
    Returns one Detection per visible person, in agent order.
    """
    detections: list[Detection] = []
    cos_r, sin_r = math.cos(robot_pose.yaw), math.sin(robot_pose.yaw)
    for idx, person in enumerate(persons):
        if getattr(person, "posture", None) not in TEMPLATES:
            continue
        if grid is not None and not _line_of_sight(
                grid, (robot_pose.x, robot_pose.y), (person.pose.x, person.pose.y)):
            continue
        world_pts = skeleton_points(person.pose, person.posture)
        # world -> robot frame
        dx = world_pts[:, 0] - robot_pose.x
        dy = world_pts[:, 1] - robot_pose.y
        robot_pts = np.column_stack([
            cos_r * dx + sin_r * dy,
            -sin_r * dx + cos_r * dy,
            world_pts[:, 2],
        ])
        try:
            projected = [camera.project(p) for p in robot_pts]
        except ProjectionError:
            continue
        uv = np.array([(u, v) for u, v, _ in projected])
        depths = np.array([d for _, _, d in projected])
        centroid_u = uv[[JOINT_NAMES.index(n) for n in _TORSO], 0].mean()
        torso_depth = depths[[JOINT_NAMES.index(n) for n in _TORSO]].mean()
        if not camera.in_horizontal_fov(float(centroid_u)):
            continue
        if torso_depth > camera.max_depth:
            continue
        if rng is not None and noise_sigma > 0.0:
            uv = uv + rng.normal(0.0, noise_sigma, size=uv.shape)
        pts = np.column_stack([uv, np.ones(17)])
        detections.append(Detection(Keypoints17(pts), depths,
                                    person.posture, idx))
    return detections

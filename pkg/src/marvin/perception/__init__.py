"""Person monitoring pipeline: synthetic detection, pose classification,
tracking, target selection, goal projection and the fall monitor."""

from __future__ import annotations

import numpy as np

from ..messages import PersonGoalMsg
from .camera import CameraModel, ProjectionError
from .classify import PoseClass, classify_pose
from .monitor import FallMonitor
from .synth import JOINT_NAMES, Detection, Keypoints17, skeleton_points, synth_detect
from .tracker import (KalmanBoxTrack, SortTracker, TrackerParams,
                      associate_detections, iou, iou_matrix, select_target)

__all__ = [
    "CameraModel", "ProjectionError", "PoseClass", "classify_pose",
    "FallMonitor", "JOINT_NAMES", "Detection", "Keypoints17",
    "skeleton_points", "synth_detect", "KalmanBoxTrack", "SortTracker",
    "TrackerParams", "associate_detections", "iou", "iou_matrix",
    "select_target", "project_goal",
]


def project_goal(kp: Keypoints17, depth_at_torso: float,
                 camera: CameraModel, stamp: float = 0.0) -> PersonGoalMsg:
    """Torso centroid pixel + aligned depth -> planar goal in the robot frame."""
    u, v = kp.torso_centroid()
    point = camera.back_project(u, v, depth_at_torso)
    return PersonGoalMsg(x=float(point[0]), y=float(point[1]), stamp=stamp)

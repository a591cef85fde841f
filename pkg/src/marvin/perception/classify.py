"""Geometric 3-class pose rule over image-space keypoints.

Replaces the learned classifier with a deterministic decision on the torso
axis angle and the hip/knee drop, testable against the generator labels and
swappable behind the same call signature.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .synth import JOINT_NAMES, Keypoints17

__all__ = ["PoseClass", "classify_pose"]

_MIN_CONFIDENT_JOINTS = 6
_UPRIGHT_MAX_DEG = 30.0
_LAYING_MIN_DEG = 60.0
_SIT_GAP_RATIO = 0.35          # knee-below-hip drop relative to torso length
_FORESHORTENED_RATIO = 0.18    # torso too short vs skeleton size to trust
_WIDE_ASPECT = 1.4             # bbox w/h that reads as a body on the ground


class PoseClass(Enum):
    STANDING = "Standing"
    SITTING = "Sitting"
    LAYING = "Laying"
    UNKNOWN = "Unknown"


def _mean_uv(kp: Keypoints17, names: tuple[str, str]) -> np.ndarray:
    rows = [JOINT_NAMES.index(n) for n in names]
    return kp.points[rows, :2].mean(axis=0)


def classify_pose(kp: Keypoints17, min_confidence: float = 0.3) -> PoseClass:
    if not isinstance(kp, Keypoints17):
        kp = Keypoints17(np.asarray(kp))
    if len(kp.confident(min_confidence)) < _MIN_CONFIDENT_JOINTS:
        return PoseClass.UNKNOWN

    mid_shoulder = _mean_uv(kp, ("left_shoulder", "right_shoulder"))
    mid_hip = _mean_uv(kp, ("left_hip", "right_hip"))
    torso = mid_hip - mid_shoulder
    torso_len = float(np.hypot(*torso))
    # angle of the torso axis from the image vertical, in [0, 90]
    angle = math.degrees(math.atan2(abs(torso[0]), abs(torso[1])))

    x1, y1, x2, y2 = kp.bbox()
    bbox_w, bbox_h = x2 - x1, y2 - y1
    diag = math.hypot(bbox_w, bbox_h)
    if diag > 1e-9 and torso_len < _FORESHORTENED_RATIO * diag:
        # torso nearly along the optical axis: fall back to silhouette shape
        return PoseClass.LAYING if bbox_w >= _WIDE_ASPECT * bbox_h else PoseClass.SITTING

    upright = angle <= _UPRIGHT_MAX_DEG
    if not upright and angle <= _LAYING_MIN_DEG:
        # between the bands: pick the nearer rule
        upright = (angle - _UPRIGHT_MAX_DEG) < (_LAYING_MIN_DEG - angle)
    if not upright:
        return PoseClass.LAYING

    mid_knee = _mean_uv(kp, ("left_knee", "right_knee"))
    knee_drop = float(mid_knee[1] - mid_hip[1])   # +v is down the image
    if knee_drop >= _SIT_GAP_RATIO * torso_len:
        return PoseClass.STANDING
    return PoseClass.SITTING

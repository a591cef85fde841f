"""Person pipeline on synthetic views: detection, tracking, pose classes.

Run:  python3 demos/track_and_classify.py
"""

import math

import numpy as np

from marvin.kinematics import Pose2D
from marvin.perception import (CameraModel, SortTracker, classify_pose,
                               project_goal, select_target, synth_detect)


class Person:
    def __init__(self, pose, posture="Standing"):
        self.pose, self.posture = pose, posture


class OpenFloor:
    resolution = 0.05
    def occupied_at(self, x, y):
        return False


camera = CameraModel()  # 70 deg hfov, 640x480, on the retracted device
robot = Pose2D(0, 0, 0)
tracker = SortTracker()
rng = np.random.default_rng(4)

# two residents: one walks across the room, one sits in a chair
walker = Person(Pose2D(3.0, -0.9, math.pi / 2))
sitter = Person(Pose2D(2.2, 0.8, math.radians(200)), "Sitting")

print("frame | tracks (id: class)                 | target | goal")
for frame in range(12):
    walker.pose = Pose2D(3.0, -0.9 + 0.1 * frame, math.pi / 2)  # 1 m/s walk
    if frame == 8:
        walker.posture = "Laying"  # collapses mid-walk
    detections = synth_detect([walker, sitter], OpenFloor(), robot, camera,
                              rng=rng, noise_sigma=2.0)
    tracks = tracker.update([d.keypoints.bbox() for d in detections])
    labels = {}
    for trk in tracks:
        if trk.last_det is not None:
            labels[trk.id] = classify_pose(detections[trk.last_det].keypoints).value
    target = select_target(tracks)
    goal_txt = "-"
    if target is not None:
        trk = next(t for t in tracks if t.id == target)
        if trk.last_det is not None:
            det = detections[trk.last_det]
            goal = project_goal(det.keypoints, det.torso_depth, camera)
            goal_txt = f"({goal.x:+.2f}, {goal.y:+.2f}) m"
    desc = ", ".join(f"{i}: {labels.get(i, '?'):8s}" for i in sorted(labels))
    print(f"{frame:5d} | {desc:37s} | {target!s:6s} | {goal_txt}")

print("\nlowest confirmed id is followed; a persisting Laying majority over a"
      "\n10 s window would raise the fall alarm (see demos/fall_watch.py)")

"""Online multi-object tracker: constant-velocity Kalman boxes associated
to detections frame by frame with an IoU-optimal assignment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = ["iou", "iou_matrix", "associate_detections", "KalmanBoxTrack",
           "SortTracker", "TrackerParams"]


def iou(bb_a, bb_b) -> float:
    """Intersection over union of two [x1, y1, x2, y2] boxes."""
    xx1 = max(bb_a[0], bb_b[0])
    yy1 = max(bb_a[1], bb_b[1])
    xx2 = min(bb_a[2], bb_b[2])
    yy2 = min(bb_a[3], bb_b[3])
    w = max(0.0, xx2 - xx1)
    h = max(0.0, yy2 - yy1)
    inter = w * h
    area_a = (bb_a[2] - bb_a[0]) * (bb_a[3] - bb_a[1])
    area_b = (bb_b[2] - bb_b[0]) * (bb_b[3] - bb_b[1])
    denom = area_a + area_b - inter
    return inter / denom if denom > 0.0 else 0.0


def iou_matrix(dets, boxes) -> np.ndarray:
    m = np.zeros((len(dets), len(boxes)))
    for d, det in enumerate(dets):
        for t, box in enumerate(boxes):
            m[d, t] = iou(det, box)
    return m


def associate_detections(matrix: np.ndarray, threshold: float):
    """Optimal assignment maximizing total gated IoU.

    Entries below the threshold carry no benefit and are never matched.
    Returns (matches [(det, trk)], unmatched_dets, unmatched_trks).
    """
    if matrix.size == 0:
        return [], list(range(matrix.shape[0])), list(range(matrix.shape[1]))
    gated = np.where(matrix >= threshold, matrix, 0.0)
    rows, cols = linear_sum_assignment(-gated)
    matches = [(int(d), int(t)) for d, t in zip(rows, cols)
               if matrix[d, t] >= threshold]
    matched_d = {d for d, _ in matches}
    matched_t = {t for _, t in matches}
    unmatched_dets = [d for d in range(matrix.shape[0]) if d not in matched_d]
    unmatched_trks = [t for t in range(matrix.shape[1]) if t not in matched_t]
    return matches, unmatched_dets, unmatched_trks


def _bbox_to_z(bbox) -> np.ndarray:
    w = bbox[2] - bbox[0]
    h = bbox[3] - bbox[1]
    return np.array([bbox[0] + w / 2.0, bbox[1] + h / 2.0, w * h, w / h])


def _x_to_bbox(x) -> np.ndarray:
    w = np.sqrt(max(x[2] * x[3], 1e-12))
    h = x[2] / w
    return np.array([x[0] - w / 2.0, x[1] - h / 2.0,
                     x[0] + w / 2.0, x[1] + h / 2.0])


class KalmanBoxTrack:
    """State [u, v, s, r, du, dv, ds]: box center, area, aspect + rates."""

    F = np.eye(7)
    F[0, 4] = F[1, 5] = F[2, 6] = 1.0
    H = np.zeros((4, 7))
    H[:4, :4] = np.eye(4)
    R = np.diag([1.0, 1.0, 10.0, 10.0])
    Q = np.diag([1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 0.0001])

    def __init__(self, bbox, track_id: int):
        self.x = np.zeros(7)
        self.x[:4] = _bbox_to_z(bbox)
        self.P = np.diag([10.0, 10.0, 10.0, 10.0, 1e4, 1e4, 1e4])
        self.id = track_id
        self.hits = 1
        self.age = 0
        self.time_since_update = 0
        self.last_det: int | None = None  # detection index in the last frame

    def predict(self) -> np.ndarray:
        if self.x[6] + self.x[2] <= 0:
            self.x[6] = 0.0
        self.x = self.F @ self.x
        self.P = self.F @ self.P @ self.F.T + self.Q
        self.age += 1
        self.time_since_update += 1
        return _x_to_bbox(self.x)

    def update(self, bbox) -> None:
        z = _bbox_to_z(bbox)
        y = z - self.H @ self.x
        S = self.H @ self.P @ self.H.T + self.R
        K = self.P @ self.H.T @ np.linalg.inv(S)
        self.x = self.x + K @ y
        self.P = (np.eye(7) - K @ self.H) @ self.P
        self.hits += 1
        self.time_since_update = 0

    @property
    def bbox(self) -> np.ndarray:
        return _x_to_bbox(self.x)


@dataclass(frozen=True)
class TrackerParams:
    iou_threshold: float = 0.3
    max_age: int = 5
    min_hits: int = 3


class SortTracker:
    """IDs are handed out in creation order starting at 1, never reused."""

    def __init__(self, params: TrackerParams | None = None):
        self.params = params or TrackerParams()
        self.tracks: list[KalmanBoxTrack] = []
        self._next_id = 1

    def update(self, detections) -> list[KalmanBoxTrack]:
        """Advance one frame with a list of [x1, y1, x2, y2] detections."""
        predicted = [trk.predict() for trk in self.tracks]
        # stale tracks go before association, so a reappearing detection
        # after max_age missed frames starts a fresh identity
        keep = [i for i, trk in enumerate(self.tracks)
                if trk.time_since_update <= self.params.max_age]
        self.tracks = [self.tracks[i] for i in keep]
        predicted = [predicted[i] for i in keep]

        matrix = iou_matrix(detections, predicted)
        matches, unmatched_dets, _ = associate_detections(
            matrix, self.params.iou_threshold)
        for trk in self.tracks:
            trk.last_det = None
        for d, t in matches:
            self.tracks[t].update(detections[d])
            self.tracks[t].last_det = d
        for d in unmatched_dets:
            track = KalmanBoxTrack(detections[d], self._next_id)
            track.last_det = d
            self.tracks.append(track)
            self._next_id += 1
        return list(self.tracks)

    def confirmed(self) -> list[KalmanBoxTrack]:
        return [t for t in self.tracks if t.hits >= self.params.min_hits]


def select_target(tracks, min_hits: int = 3) -> int | None:
    """Lowest-ID confirmed track, or None when nobody qualifies."""
    ids = [t.id for t in tracks if t.hits >= min_hits]
    return min(ids) if ids else None

"""Holonomic path and person following.

Translation and heading are controlled independently: the velocity vector
chases a lookahead point on the path (or a standoff point near the person)
while the yaw rate tracks a separate gaze target, and only the final twist
goes through the admissible-velocity filter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..config import NavConfig
from ..kinematics import (ChassisParams, Pose2D, Twist2D, clamp_to_octahedron,
                          wrap_angle)
from ..messages import PersonGoalMsg

__all__ = ["FollowerParams", "path_velocity", "gaze_yaw_rate", "follow_path",
           "follow_person", "FollowController", "FollowStatus"]


@dataclass(frozen=True)
class FollowerParams:
    chassis: ChassisParams
    v_max: float = 1.5
    a_max: float = 1.0
    lookahead: float = 0.35
    slow_radius: float = 0.6
    goal_tolerance: float = 0.15
    yaw_gain: float = 3.5
    standoff: float = 1.2
    follow_gain: float = 2.0
    speed_cap: float | None = None

    @classmethod
    def from_config(cls, chassis: ChassisParams, nav: NavConfig,
                    v_max: float = 1.5, a_max: float = 1.0,
                    speed_cap: float | None = None):
        return cls(chassis, v_max=v_max, a_max=a_max, lookahead=nav.lookahead,
                   slow_radius=nav.slow_radius,
                   goal_tolerance=nav.goal_pos_tolerance,
                   yaw_gain=nav.yaw_gain, standoff=nav.follow_standoff,
                   follow_gain=nav.follow_gain, speed_cap=speed_cap)

    @property
    def cruise(self) -> float:
        if self.speed_cap is not None:
            return min(self.v_max, self.speed_cap)
        return self.v_max


def _point_ahead(points, start: int, arc: float):
    travelled = 0.0
    prev = points[start]
    for point in points[start + 1:]:
        travelled += math.hypot(point[0] - prev[0], point[1] - prev[1])
        prev = point
        if travelled >= arc:
            return point
    return points[-1]


def path_velocity(points, pose: Pose2D,
                  params: FollowerParams) -> tuple[float, float, bool]:
    """Body-frame (vx, vy) toward the lookahead point, pre-filter.

    Returns (vx, vy, reached). Speed obeys a braking profile near the goal
    and slows ahead of sharp bends (the base can only shed a_max per
    second), and is independent of any gaze target.
    """
    if not points:
        raise ValueError("empty path")
    gx, gy = points[-1]
    dist_goal = math.hypot(gx - pose.x, gy - pose.y)
    if dist_goal <= params.goal_tolerance:
        return 0.0, 0.0, True

    nearest = min(range(len(points)),
                  key=lambda i: (points[i][0] - pose.x) ** 2 +
                                (points[i][1] - pose.y) ** 2)
    target = _point_ahead(points, nearest, params.lookahead)
    dx, dy = target[0] - pose.x, target[1] - pose.y
    norm = math.hypot(dx, dy)
    if norm < 1e-9:
        return 0.0, 0.0, False

    # braking profile into the goal
    brake = math.sqrt(2.0 * 0.7 * params.a_max *
                      max(0.0, dist_goal - 0.5 * params.goal_tolerance))
    speed = min(params.cruise, brake)
    # slow ahead of bends: compare the near direction with the one farther on
    far = _point_ahead(points, nearest, params.lookahead * 3.0)
    fx, fy = far[0] - target[0], far[1] - target[1]
    fnorm = math.hypot(fx, fy)
    if fnorm > 1e-6:
        align = (dx * fx + dy * fy) / (norm * fnorm)
        speed *= max(0.3, min(1.0, 0.5 + 0.5 * align))
    wx, wy = dx / norm * speed, dy / norm * speed
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    return c * wx + s * wy, -s * wx + c * wy, False


def gaze_yaw_rate(pose: Pose2D, gaze_xy: tuple[float, float] | None,
                  params: FollowerParams) -> float:
    """Proportional heading control toward a world-frame gaze point."""
    if gaze_xy is None:
        return 0.0
    bearing = math.atan2(gaze_xy[1] - pose.y, gaze_xy[0] - pose.x)
    return params.yaw_gain * wrap_angle(bearing - pose.yaw)


def follow_path(points, pose: Pose2D, params: FollowerParams,
                gaze_xy: tuple[float, float] | None = None
                ) -> tuple[Twist2D, bool]:
    """Full path-following twist, clamped into the admissible set.

    Without an explicit gaze target, the base looks where it is going (a
    point a bit past the lookahead), keeping the long axis aligned with the
    path through narrow passages.
    """
    vx, vy, reached = path_velocity(points, pose, params)
    if gaze_xy is None and not reached and len(points) >= 2:
        nearest = min(range(len(points)),
                      key=lambda i: (points[i][0] - pose.x) ** 2 +
                                    (points[i][1] - pose.y) ** 2)
        ahead = _point_ahead(points, nearest, params.lookahead * 2.0)
        gaze_xy = ahead if math.hypot(ahead[0] - pose.x,
                                      ahead[1] - pose.y) > 0.05 else points[-1]
    w = gaze_yaw_rate(pose, gaze_xy, params)
    return clamp_to_octahedron(params.chassis, Twist2D(vx, vy, w)), reached


def follow_person(goal: PersonGoalMsg, pose: Pose2D,
                  params: FollowerParams) -> Twist2D:
    """Steer to a standoff point on the robot-person line, gazing at the
    person; inside the standoff only the heading keeps tracking."""
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    px = pose.x + c * goal.x - s * goal.y
    py = pose.y + s * goal.x + c * goal.y
    dist = math.hypot(px - pose.x, py - pose.y)
    w = gaze_yaw_rate(pose, (px, py), params)
    if dist <= params.standoff:
        return clamp_to_octahedron(params.chassis, Twist2D(0.0, 0.0, w))
    ux, uy = (px - pose.x) / dist, (py - pose.y) / dist
    speed = min(params.cruise, params.follow_gain * (dist - params.standoff))
    wx, wy = ux * speed, uy * speed
    vx, vy = c * wx + s * wy, -s * wx + c * wy
    return clamp_to_octahedron(params.chassis, Twist2D(vx, vy, w))


@dataclass(frozen=True)
class FollowStatus:
    twist: Twist2D
    searching: bool = False
    timed_out: bool = False


class FollowController:
    """Keeps the last person goal; a stale goal turns into a search: the
    base holds position and swings its gaze to the last seen spot until the
    person reappears or the search times out."""

    def __init__(self, params: FollowerParams, stale_after: float = 1.0,
                 search_timeout: float = 5.0):
        self.params = params
        self.stale_after = stale_after
        self.search_timeout = search_timeout
        self._last_goal: PersonGoalMsg | None = None
        self._last_world: tuple[float, float] | None = None
        self._timeout_fired = False
        self._started = 0.0

    def reset(self, now: float = 0.0) -> None:
        self._last_goal = None
        self._last_world = None
        self._timeout_fired = False
        self._started = now

    def update(self, goal: PersonGoalMsg | None, pose: Pose2D,
               now: float) -> FollowStatus:
        if goal is not None:
            self._last_goal = goal
            c, s = math.cos(pose.yaw), math.sin(pose.yaw)
            self._last_world = (pose.x + c * goal.x - s * goal.y,
                                pose.y + s * goal.x + c * goal.y)
            self._timeout_fired = False
        last = self._last_goal
        if last is None or now - last.stamp >= self.stale_after:
            # sight lost: the clock runs from the last goal, or from when
            # following began if nobody was ever seen
            age = now - (self._started if last is None else last.stamp)
            timed_out = (not self._timeout_fired) and age >= self.search_timeout
            if timed_out:
                self._timeout_fired = True
            w = 0.0
            if self._last_world is not None and age < self.search_timeout:
                # hold position, swing the gaze back to the last seen spot
                w = gaze_yaw_rate(pose, self._last_world, self.params)
            twist = clamp_to_octahedron(self.params.chassis,
                                        Twist2D(0.0, 0.0, w))
            return FollowStatus(twist, searching=True, timed_out=timed_out)
        return FollowStatus(follow_person(last, pose, self.params))

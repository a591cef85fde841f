"""Mecanum chassis kinematics.

Forward (wheel rates -> body twist), its exact inverse, the admissible
velocity filter (an L1 ball in (vx, vy, L*yaw_rate) set by the wheel speed
limit) and constant-twist odometry integration. Wheel order everywhere is
(front-left, front-right, rear-right, rear-left).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ChassisParams",
    "Twist2D",
    "WheelSpeeds",
    "Pose2D",
    "forward_kinematics",
    "inverse_kinematics",
    "clamp_to_octahedron",
    "integrate_odometry",
    "wrap_angle",
]

# Relative slack so clamping is exactly idempotent despite rounding.
_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class ChassisParams:
    """Geometry and actuation limit of the four-mecanum-wheel base.

    wheel_radius (m), longitudinal/transverse semi-axes (m, chassis center to
    wheel contact) and the per-wheel speed limit (rad/s).
    """

    wheel_radius: float = 0.05
    longitudinal_semi_axis: float = 0.15
    transverse_semi_axis: float = 0.15
    wheel_speed_max: float = 30.0

    def __post_init__(self) -> None:
        for name in ("wheel_radius", "longitudinal_semi_axis",
                     "transverse_semi_axis", "wheel_speed_max"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def lever(self) -> float:
        """L = l + w, the yaw lever arm of the kinematic matrix."""
        return self.longitudinal_semi_axis + self.transverse_semi_axis


@dataclass(frozen=True)
class Twist2D:
    """Planar chassis velocity in the chassis frame: vx, vy (m/s), yaw_rate (rad/s)."""

    vx: float = 0.0
    vy: float = 0.0
    yaw_rate: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.vx, self.vy, self.yaw_rate)):
            raise ValueError(f"twist components must be finite: {self}")

    @property
    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)


@dataclass(frozen=True)
class WheelSpeeds:
    """Angular rates of the four wheels (rad/s)."""

    fl: float = 0.0
    fr: float = 0.0
    rr: float = 0.0
    rl: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.fl, self.fr, self.rr, self.rl)):
            raise ValueError(f"wheel speeds must be finite: {self}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.fl, self.fr, self.rr, self.rl)

    @property
    def max_abs(self) -> float:
        return max(abs(self.fl), abs(self.fr), abs(self.rr), abs(self.rl))


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class Pose2D:
    """World-frame planar pose; yaw is stored wrapped to (-pi, pi]."""

    x: float = 0.0
    y: float = 0.0
    yaw: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.yaw)):
            raise ValueError(f"pose components must be finite: {self}")
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))


def forward_kinematics(params: ChassisParams, wheels: WheelSpeeds) -> Twist2D:
    """Body twist produced by the given wheel rates.

    vx  = (r/4) (fl + fr + rr + rl)
    vy  = (r/4) (-fl + fr - rr + rl)
    yaw = (r/4L)(-fl + fr + rr - rl)
    """
    q = params.wheel_radius / 4.0
    fl, fr, rr, rl = wheels.as_tuple()
    vx = q * (fl + fr + rr + rl)
    vy = q * (-fl + fr - rr + rl)
    yaw_rate = q * (-fl + fr + rr - rl) / params.lever
    return Twist2D(vx, vy, yaw_rate)


def inverse_kinematics(params: ChassisParams, twist: Twist2D) -> WheelSpeeds:
    """Wheel rates realizing the given body twist (exact right inverse)."""
    r = params.wheel_radius
    lever = params.lever
    vx, vy, w = twist.vx, twist.vy, twist.yaw_rate
    return WheelSpeeds(
        fl=(vx - vy - lever * w) / r,
        fr=(vx + vy + lever * w) / r,
        rr=(vx - vy + lever * w) / r,
        rl=(vx + vy - lever * w) / r,
    )


def clamp_to_octahedron(params: ChassisParams, twist: Twist2D) -> Twist2D:
    """Filter a twist into the admissible set |vx|+|vy|+L|yaw| <= r*w_max.

    Yaw rate is kept whenever it is feasible on its own; the linear part is
    then scaled by a single factor in [0, 1] to fit the remaining budget, so
    the translation direction is preserved. When rotation alone exceeds the
    budget, yaw is saturated and translation drops to zero.
    """
    budget = params.wheel_radius * params.wheel_speed_max
    lever = params.lever
    yaw_cost = lever * abs(twist.yaw_rate)
    if yaw_cost > budget:
        return Twist2D(0.0, 0.0, math.copysign(budget / lever, twist.yaw_rate))
    linear_budget = budget - yaw_cost
    norm = abs(twist.vx) + abs(twist.vy)
    if norm <= linear_budget * (1.0 + _CLAMP_TOL):
        return twist
    if linear_budget <= 0.0:
        return Twist2D(0.0, 0.0, twist.yaw_rate)
    scale = linear_budget / norm
    return Twist2D(twist.vx * scale, twist.vy * scale, twist.yaw_rate)


def integrate_odometry(pose: Pose2D, twist: Twist2D, dt: float) -> Pose2D:
    """Advance a world pose by a constant body twist over dt seconds.

    Uses the exact screw motion (arc) rather than an Euler step, so n steps
    of dt compose exactly to one step of n*dt.
    """
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be finite and > 0, got {dt!r}")
    w = twist.yaw_rate
    yaw0 = pose.yaw
    if abs(w) < 1e-12:
        c, s = math.cos(yaw0), math.sin(yaw0)
        dx = (twist.vx * c - twist.vy * s) * dt
        dy = (twist.vx * s + twist.vy * c) * dt
        return Pose2D(pose.x + dx, pose.y + dy, yaw0 + w * dt)
    yaw1 = yaw0 + w * dt
    ds = math.sin(yaw1) - math.sin(yaw0)
    dc = math.cos(yaw1) - math.cos(yaw0)
    dx = (twist.vx * ds + twist.vy * dc) / w
    dy = (-twist.vx * dc + twist.vy * ds) / w
    return Pose2D(pose.x + dx, pose.y + dy, yaw1)

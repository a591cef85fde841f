"""Global configuration tree.

Every tunable of the stack lives here with its default; a YAML file (path
given explicitly or through the MARVIN_CONFIG environment variable) can
override any subset, using section names that match the dataclass fields.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .kinematics import ChassisParams


@dataclass
class MotionLimits:
    v_max: float = 1.5            # m/s, human-walk upper bound
    a_max: float = 1.0            # m/s^2, midpoint of the 0.7..1.5 range
    alpha_max: float = 4.0        # rad/s^2; gaze keeping needs agile yaw
    footprint_length: float = 0.60
    footprint_width: float = 0.40


@dataclass
class PidConfig:
    kp: float = 2.0
    ki: float = 40.0
    kd: float = 0.0
    integral_limit: float = 20.0  # command units


@dataclass
class PlantConfig:
    time_constant: float = 0.1    # s
    gain: float = 1.0             # rad/s per command unit


@dataclass
class DeviceConfig:
    steps_per_rev: int = 200
    microstep_factor: int = 256
    screw_pitch_mm: float = 6.35
    linear_stroke_m: float = 0.350
    tilt_stroke_deg: float = 26.0
    linear_homing_speed: float = 0.020   # m/s
    linear_operational_speed: float = 0.040
    tilt_homing_speed: float = 5.0       # deg/s
    tilt_operational_speed: float = 10.0


@dataclass
class BusConfig:
    manual_timeout: float = 0.5   # s, joystick freshness window
    auto_timeout: float = 0.5
    queue_depth: int = 64
    control_rate: float = 50.0    # Hz
    lidar_rate: float = 10.0
    perception_rate: float = 10.0


@dataclass
class CameraConfig:
    hfov_deg: float = 70.0
    width: int = 640
    height: int = 480
    max_depth: float = 6.0
    mount_forward: float = 0.15   # camera offset ahead of chassis center (m)
    mount_base_height: float = 0.55  # lens height with device retracted (m)
    pixel_noise_sigma: float = 2.0


@dataclass
class PerceptionConfig:
    iou_threshold: float = 0.3
    max_age: int = 5
    min_hits: int = 3
    fall_window: float = 10.0     # s
    fall_fraction: float = 0.8
    rearm_fraction: float = 0.5
    min_joint_confidence: float = 0.3


@dataclass
class VocalConfig:
    trigger_word: str = "marvin"
    similarity_threshold: float = 0.35
    silence_threshold: float = 0.1
    hold_duration: float = 0.8    # s of silence that closes a capture
    max_utterance: float = 10.0
    help_confirm_timeout: float = 10.0


@dataclass
class NavConfig:
    inflation_radius: float = 0.36  # half-diagonal of the footprint
    lethal_cost: int = 254
    lookahead: float = 0.35
    goal_pos_tolerance: float = 0.15
    goal_yaw_tolerance: float = 0.2
    slow_radius: float = 0.6      # trapezoidal slowdown region
    yaw_gain: float = 3.5
    follow_standoff: float = 1.2
    follow_gain: float = 2.0
    goal_stale_after: float = 1.0
    search_timeout: float = 5.0
    night_speed_cap: float = 0.5
    replan_period: float = 0.5
    l_occ: float = 0.85
    l_free: float = -0.4
    logodds_clamp: float = 4.0
    p_occupied: float = 0.65
    p_free: float = 0.35


@dataclass
class SimConfig:
    tick: float = 0.02            # 50 Hz master clock
    lidar_beams: int = 360
    lidar_max_range: float = 8.0
    lidar_noise_sigma: float = 0.0  # enabled per scenario when wanted


@dataclass
class MarvinConfig:
    chassis: ChassisParams = field(default_factory=ChassisParams)
    limits: MotionLimits = field(default_factory=MotionLimits)
    pid: PidConfig = field(default_factory=PidConfig)
    plant: PlantConfig = field(default_factory=PlantConfig)
    device: DeviceConfig = field(default_factory=DeviceConfig)
    bus: BusConfig = field(default_factory=BusConfig)
    camera: CameraConfig = field(default_factory=CameraConfig)
    perception: PerceptionConfig = field(default_factory=PerceptionConfig)
    vocal: VocalConfig = field(default_factory=VocalConfig)
    nav: NavConfig = field(default_factory=NavConfig)
    sim: SimConfig = field(default_factory=SimConfig)


def _apply_overrides(obj, overrides: dict):
    fields = {f.name: f for f in dataclasses.fields(obj)}
    updates = {}
    for key, value in overrides.items():
        if key not in fields:
            raise KeyError(f"unknown config key {key!r} for {type(obj).__name__}")
        current = getattr(obj, key)
        if dataclasses.is_dataclass(current) and isinstance(value, dict):
            updates[key] = _apply_overrides(current, value)
        else:
            updates[key] = type(current)(value) if current is not None else value
    return dataclasses.replace(obj, **updates)


def load_config(path: str | os.PathLike | None = None) -> MarvinConfig:
    """Build the config, merging a YAML override file if one is given.

    Falls back to the MARVIN_CONFIG environment variable when path is None.
    """
    config = MarvinConfig()
    if path is None:
        path = os.environ.get("MARVIN_CONFIG")
    if not path:
        return config
    text = Path(path).read_text()
    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must contain a mapping")
    return _apply_overrides(config, data)

"""Simulated microcontroller layer.

Per-wheel PID speed loops closed around first-order motor plants, the
two-axis positioning device (homing against its limit switches, predefined
strokes, microstep arithmetic) and the lighting system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .config import DeviceConfig, PidConfig, PlantConfig
from .kinematics import WheelSpeeds

__all__ = [
    "PidGains", "PidState", "pid_step",
    "WheelPlant", "WheelLoop",
    "AxisSpec", "DevicePhase", "DeviceTarget", "DeviceState",
    "PositioningDevice", "microsteps_for_travel",
    "DeviceBusyError", "DevicePhaseError",
    "LowLayer", "LowLayerTelemetry",
]


class DeviceBusyError(RuntimeError):
    """Raised when a stroke command arrives while the device is not Ready."""


class DevicePhaseError(RuntimeError):
    """Raised when an operation is invalid for the current device phase."""


# --------------------------------------------------------------------------
# Wheel speed loops
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PidGains:
    kp: float = 2.0
    ki: float = 40.0
    kd: float = 0.0
    integral_limit: float = 20.0

    def __post_init__(self) -> None:
        if min(self.kp, self.ki, self.kd) < 0.0:
            raise ValueError("PID gains must be >= 0")
        if self.integral_limit <= 0.0:
            raise ValueError("integral_limit must be > 0")

    @classmethod
    def from_config(cls, cfg: PidConfig) -> "PidGains":
        return cls(cfg.kp, cfg.ki, cfg.kd, cfg.integral_limit)


@dataclass(frozen=True)
class PidState:
    integral: float = 0.0            # integral contribution, command units
    prev_measurement: float | None = None


def pid_step(gains: PidGains, state: PidState, setpoint: float,
             measurement: float, dt: float) -> tuple[float, PidState]:
    """One positional PID update with clamped integral and derivative on
    measurement (derivative is seeded to zero at the first call)."""
    if dt <= 0.0 or not math.isfinite(dt):
        raise ValueError(f"dt must be > 0, got {dt!r}")
    error = setpoint - measurement
    integral = state.integral + gains.ki * error * dt
    integral = max(-gains.integral_limit, min(gains.integral_limit, integral))
    if state.prev_measurement is None:
        derivative = 0.0
    else:
        derivative = (measurement - state.prev_measurement) / dt
    command = gains.kp * error + integral - gains.kd * derivative
    return command, PidState(integral=integral, prev_measurement=measurement)


class WheelPlant:
    """First-order motor model: tau * dw/dt = K*u - w, stepped exactly."""

    def __init__(self, time_constant: float = 0.1, gain: float = 1.0,
                 speed: float = 0.0):
        if time_constant <= 0.0 or gain <= 0.0:
            raise ValueError("plant time_constant and gain must be > 0")
        self.time_constant = time_constant
        self.gain = gain
        self.speed = speed

    @classmethod
    def from_config(cls, cfg: PlantConfig) -> "WheelPlant":
        return cls(cfg.time_constant, cfg.gain)

    def step(self, command: float, dt: float) -> float:
        target = self.gain * command
        decay = math.exp(-dt / self.time_constant)
        self.speed = target + (self.speed - target) * decay
        return self.speed


class WheelLoop:
    """Four independent PID+plant closed loops, one per wheel."""

    def __init__(self, gains: PidGains, plants: list[WheelPlant] | None = None):
        self.gains = gains
        self.plants = plants if plants is not None else [WheelPlant() for _ in range(4)]
        if len(self.plants) != 4:
            raise ValueError("four wheel plants required")
        self.states = [PidState() for _ in range(4)]

    def step(self, target: WheelSpeeds, dt: float) -> WheelSpeeds:
        achieved = []
        for i, setpoint in enumerate(target.as_tuple()):
            command, self.states[i] = pid_step(
                self.gains, self.states[i], setpoint, self.plants[i].speed, dt)
            achieved.append(self.plants[i].step(command, dt))
        return WheelSpeeds(*achieved)

    @property
    def speeds(self) -> WheelSpeeds:
        return WheelSpeeds(*(p.speed for p in self.plants))


# --------------------------------------------------------------------------
# Positioning device
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AxisSpec:
    """Stepper axis: screw/microstep arithmetic plus motion rates.

    stroke and speeds are in the axis' native unit (m for the linear axis,
    degrees for the tilt axis).
    """

    stroke: float
    homing_speed: float
    operational_speed: float
    steps_per_rev: int = 200
    microstep_factor: int = 256
    screw_pitch_mm: float = 6.35

    def __post_init__(self) -> None:
        if self.stroke <= 0.0:
            raise ValueError("stroke must be > 0")
        if self.steps_per_rev * self.microstep_factor <= 0:
            raise ValueError("steps_per_rev * microstep_factor must be > 0")
        if self.homing_speed <= 0.0 or self.operational_speed <= 0.0:
            raise ValueError("axis speeds must be > 0")


def microsteps_for_travel(spec: AxisSpec, travel_mm: float) -> int:
    """Microstep count for a linear travel, ties rounded half away from zero."""
    stroke_mm = spec.stroke * 1000.0
    if not (0.0 <= travel_mm <= stroke_mm + 1e-9):
        raise ValueError(f"travel {travel_mm} mm outside [0, {stroke_mm}] mm")
    exact = travel_mm / spec.screw_pitch_mm * spec.steps_per_rev * spec.microstep_factor
    return int(math.floor(exact + 0.5)) if exact >= 0 else -int(math.floor(-exact + 0.5))


class DevicePhase(Enum):
    UNHOMED = "Unhomed"
    HOMING = "Homing"
    READY = "Ready"
    MOVING = "Moving"


class DeviceTarget(Enum):
    DEPLOY = "Deploy"
    RETRACT = "Retract"
    TILT_FORWARD = "TiltForward"
    TILT_HOME = "TiltHome"


@dataclass(frozen=True)
class DeviceState:
    linear_pos: float = 0.0   # m, 0 = retracted
    tilt_pos: float = 0.0     # deg, 0 = upright
    phase: DevicePhase = DevicePhase.UNHOMED

    # limit switches are pressed exactly at the zero ends of travel
    @property
    def switch_linear(self) -> bool:
        return self.linear_pos == 0.0

    @property
    def switch_tilt(self) -> bool:
        return self.tilt_pos == 0.0


def _toward(pos: float, target: float, rate: float, dt: float) -> float:
    step = rate * dt
    if pos < target:
        return min(target, pos + step)
    return max(target, pos - step)


def homing_step(state: DeviceState, linear: AxisSpec, tilt: AxisSpec,
                dt: float) -> DeviceState:
    """Drive both axes toward their switches; lands on exact zeros."""
    if state.phase not in (DevicePhase.UNHOMED, DevicePhase.HOMING):
        raise DevicePhaseError(f"homing_step in phase {state.phase.value}")
    if state.switch_linear and state.switch_tilt:
        return replace(state, linear_pos=0.0, tilt_pos=0.0, phase=DevicePhase.READY)
    lin = _toward(state.linear_pos, 0.0, linear.homing_speed, dt)
    tlt = _toward(state.tilt_pos, 0.0, tilt.homing_speed, dt)
    phase = DevicePhase.READY if (lin == 0.0 and tlt == 0.0) else DevicePhase.HOMING
    return DeviceState(linear_pos=lin, tilt_pos=tlt, phase=phase)


class PositioningDevice:
    """Two-axis deployable head: 350 mm linear travel plus 26 deg tilt."""

    def __init__(self, cfg: DeviceConfig | None = None,
                 state: DeviceState | None = None):
        cfg = cfg or DeviceConfig()
        self.linear_axis = AxisSpec(
            stroke=cfg.linear_stroke_m,
            homing_speed=cfg.linear_homing_speed,
            operational_speed=cfg.linear_operational_speed,
            steps_per_rev=cfg.steps_per_rev,
            microstep_factor=cfg.microstep_factor,
            screw_pitch_mm=cfg.screw_pitch_mm,
        )
        self.tilt_axis = AxisSpec(
            stroke=cfg.tilt_stroke_deg,
            homing_speed=cfg.tilt_homing_speed,
            operational_speed=cfg.tilt_operational_speed,
            steps_per_rev=cfg.steps_per_rev,
            microstep_factor=cfg.microstep_factor,
            screw_pitch_mm=cfg.screw_pitch_mm,
        )
        self.state = state or DeviceState()
        self._move_axis: str | None = None
        self._move_target: float = 0.0

    def command(self, target: DeviceTarget) -> DeviceState:
        """Begin one predefined stroke; only legal when Ready."""
        if self.state.phase is not DevicePhase.READY:
            raise DeviceBusyError(
                f"device command {target.value} in phase {self.state.phase.value}")
        if target is DeviceTarget.DEPLOY:
            self._move_axis, self._move_target = "linear", self.linear_axis.stroke
        elif target is DeviceTarget.RETRACT:
            self._move_axis, self._move_target = "linear", 0.0
        elif target is DeviceTarget.TILT_FORWARD:
            self._move_axis, self._move_target = "tilt", self.tilt_axis.stroke
        else:
            self._move_axis, self._move_target = "tilt", 0.0
        self.state = replace(self.state, phase=DevicePhase.MOVING)
        return self.state

    def step(self, dt: float) -> DeviceState:
        phase = self.state.phase
        if phase in (DevicePhase.UNHOMED, DevicePhase.HOMING):
            self.state = homing_step(self.state, self.linear_axis, self.tilt_axis, dt)
        elif phase is DevicePhase.MOVING:
            if self._move_axis == "linear":
                pos = _toward(self.state.linear_pos, self._move_target,
                              self.linear_axis.operational_speed, dt)
                done = pos == self._move_target
                self.state = replace(self.state, linear_pos=pos,
                                     phase=DevicePhase.READY if done else DevicePhase.MOVING)
            else:
                pos = _toward(self.state.tilt_pos, self._move_target,
                              self.tilt_axis.operational_speed, dt)
                done = pos == self._move_target
                self.state = replace(self.state, tilt_pos=pos,
                                     phase=DevicePhase.READY if done else DevicePhase.MOVING)
            if self.state.phase is DevicePhase.READY:
                self._move_axis = None
        return self.state


# --------------------------------------------------------------------------
# Whole low layer
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LowLayerTelemetry:
    wheel_speeds: WheelSpeeds
    device: DeviceState
    lights_on: bool


class LowLayer:
    """Everything the MCU firmware owns, advanced on one 50 Hz tick."""

    def __init__(self, gains: PidGains | None = None,
                 plants: list[WheelPlant] | None = None,
                 device: PositioningDevice | None = None):
        self.wheels = WheelLoop(gains or PidGains(), plants)
        self.device = device or PositioningDevice()
        self.lights_on = False

    def set_lights(self, on: bool) -> bool:
        self.lights_on = bool(on)
        return self.lights_on

    def tick(self, wheel_target: WheelSpeeds, dt: float) -> LowLayerTelemetry:
        achieved = self.wheels.step(wheel_target, dt)
        self.device.step(dt)
        return LowLayerTelemetry(achieved, self.device.state, self.lights_on)

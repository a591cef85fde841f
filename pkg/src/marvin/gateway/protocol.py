"""Wire protocol: JSON encoding of every bus payload, 1:1 with the topic
registry. `python3 -m marvin.gateway.protocol` prints the machine-readable
schema the console's contract tests validate against."""

from __future__ import annotations

import base64
import json
from typing import Any

from ..bus import Envelope
from ..kinematics import Pose2D, Twist2D, WheelSpeeds
from ..lowlayer import DevicePhase
from ..messages import (COMMAND_TOPICS, TOPICS, ActionKind, ActionRequest,
                        DeviceRequest, EstopCommand, Event, GridMsg,
                        HelpReply, LidarScanMsg, LightsRequest, NavGoal,
                        PersonGoalMsg, PlannedPathMsg, RobotTelemetry,
                        Source, TrackSet, TrackState, UtteranceFrameMsg,
                        VelocityCommand, VocalEvent)

__all__ = ["WIRE_VERSION", "WireError", "encode_payload", "decode_payload",
           "encode_envelope", "protocol_spec"]

WIRE_VERSION = "MARVINWIRE v1"


class WireError(ValueError):
    """Inbound message does not match the topic schema."""


def _pose(p: Pose2D) -> dict:
    return {"x": p.x, "y": p.y, "yaw": p.yaw}


def _twist(t: Twist2D) -> dict:
    return {"vx": t.vx, "vy": t.vy, "yaw_rate": t.yaw_rate}


def encode_payload(payload: Any) -> dict:
    if isinstance(payload, ActionRequest):
        return {"kind": payload.kind.value, "source": payload.source.value,
                "poi": payload.poi}
    if isinstance(payload, VelocityCommand):
        return {"twist": _twist(payload.twist), "source": payload.source.value,
                "stamp": payload.stamp}
    if isinstance(payload, EstopCommand):
        return {"latch": payload.latch}
    if isinstance(payload, DeviceRequest):
        return {"target": payload.target}
    if isinstance(payload, HelpReply):
        return {"confirm": payload.confirm}
    if isinstance(payload, LightsRequest):
        return {"on": payload.on}
    if isinstance(payload, UtteranceFrameMsg):
        return {"stamp": payload.stamp, "energy": payload.energy,
                "token": payload.token}
    if isinstance(payload, VocalEvent):
        return {"kind": payload.kind, "text": payload.text,
                "stamp": payload.stamp}
    if isinstance(payload, RobotTelemetry):
        return {"stamp": payload.stamp, "pose": _pose(payload.pose),
                "twist": _twist(payload.twist),
                "commanded_twist": _twist(payload.commanded_twist),
                "wheel_speeds": {"fl": payload.wheel_speeds.fl,
                                 "fr": payload.wheel_speeds.fr,
                                 "rr": payload.wheel_speeds.rr,
                                 "rl": payload.wheel_speeds.rl},
                "device_linear": payload.device_linear,
                "device_tilt": payload.device_tilt,
                "device_phase": payload.device_phase.value,
                "lights_on": payload.lights_on,
                "estop_latched": payload.estop_latched}
    if isinstance(payload, LidarScanMsg):
        return {"stamp": payload.stamp, "angle_start": payload.angle_start,
                "angle_step": payload.angle_step,
                "max_range": payload.max_range,
                "ranges": list(payload.ranges)}
    if isinstance(payload, TrackSet):
        return {"stamp": payload.stamp, "target_id": payload.target_id,
                "tracks": [{"track_id": t.track_id, "bbox": list(t.bbox),
                            "hits": t.hits, "age": t.age,
                            "time_since_update": t.time_since_update,
                            "pose_class": t.pose_class}
                           for t in payload.tracks]}
    if isinstance(payload, PersonGoalMsg):
        return {"x": payload.x, "y": payload.y, "stamp": payload.stamp}
    if isinstance(payload, NavGoal):
        return {"pose": _pose(payload.pose), "speed_cap": payload.speed_cap,
                "label": payload.label}
    if isinstance(payload, PlannedPathMsg):
        return {"stamp": payload.stamp,
                "points": [list(p) for p in payload.points],
                "total_cost": payload.total_cost}
    if isinstance(payload, GridMsg):
        return {"stamp": payload.stamp, "width": payload.width,
                "height": payload.height, "resolution": payload.resolution,
                "origin": _pose(payload.origin),
                "cells": base64.b64encode(payload.cells).decode("ascii")}
    if isinstance(payload, Event):
        return {"name": payload.name, "stamp": payload.stamp,
                "data": payload.data}
    raise WireError(f"no encoder for {type(payload).__name__}")


def _require(data: dict, key: str, kinds) -> Any:
    if key not in data:
        raise WireError(f"missing field {key!r}")
    value = data[key]
    if not isinstance(value, kinds):
        raise WireError(f"field {key!r} has wrong type {type(value).__name__}")
    return value


_NUM = (int, float)


def _decode_pose(data: dict) -> Pose2D:
    return Pose2D(float(_require(data, "x", _NUM)),
                  float(_require(data, "y", _NUM)),
                  float(data.get("yaw", 0.0)))


def _decode_twist(data: dict) -> Twist2D:
    return Twist2D(float(_require(data, "vx", _NUM)),
                   float(_require(data, "vy", _NUM)),
                   float(_require(data, "yaw_rate", _NUM)))


def decode_payload(topic: str, data: dict) -> Any:
    """Inbound JSON object -> typed payload; WireError on any mismatch."""
    payload_type = TOPICS.get(topic)
    if payload_type is None:
        raise WireError(f"unknown topic {topic!r}")
    if not isinstance(data, dict):
        raise WireError("payload must be an object")
    try:
        if payload_type is ActionRequest:
            return ActionRequest(ActionKind(_require(data, "kind", str)),
                                 Source(data.get("source", "Manual")),
                                 poi=data.get("poi"))
        if payload_type is VelocityCommand:
            return VelocityCommand(_decode_twist(_require(data, "twist", dict)),
                                   Source(data.get("source", "Manual")),
                                   float(_require(data, "stamp", _NUM)))
        if payload_type is EstopCommand:
            return EstopCommand(bool(_require(data, "latch", bool)))
        if payload_type is DeviceRequest:
            return DeviceRequest(_require(data, "target", str))
        if payload_type is HelpReply:
            return HelpReply(bool(_require(data, "confirm", bool)))
        if payload_type is LightsRequest:
            return LightsRequest(bool(_require(data, "on", bool)))
        if payload_type is UtteranceFrameMsg:
            token = data.get("token")
            if token is not None and not isinstance(token, str):
                raise WireError("token must be a string or null")
            return UtteranceFrameMsg(float(_require(data, "stamp", _NUM)),
                                     float(_require(data, "energy", _NUM)),
                                     token)
        if payload_type is Event:
            return Event(_require(data, "name", str),
                         float(_require(data, "stamp", _NUM)),
                         dict(data.get("data") or {}))
        if payload_type is NavGoal:
            cap = data.get("speed_cap")
            return NavGoal(_decode_pose(_require(data, "pose", dict)),
                           None if cap is None else float(cap),
                           str(data.get("label", "pose")))
        if payload_type is PersonGoalMsg:
            return PersonGoalMsg(float(_require(data, "x", _NUM)),
                                 float(_require(data, "y", _NUM)),
                                 float(_require(data, "stamp", _NUM)))
        if payload_type is VocalEvent:
            return VocalEvent(_require(data, "kind", str),
                              _require(data, "text", str),
                              float(_require(data, "stamp", _NUM)))
        if payload_type is RobotTelemetry:
            wheels = _require(data, "wheel_speeds", dict)
            return RobotTelemetry(
                stamp=float(_require(data, "stamp", _NUM)),
                pose=_decode_pose(_require(data, "pose", dict)),
                twist=_decode_twist(_require(data, "twist", dict)),
                commanded_twist=_decode_twist(_require(data, "commanded_twist", dict)),
                wheel_speeds=WheelSpeeds(float(wheels["fl"]), float(wheels["fr"]),
                                         float(wheels["rr"]), float(wheels["rl"])),
                device_linear=float(_require(data, "device_linear", _NUM)),
                device_tilt=float(_require(data, "device_tilt", _NUM)),
                device_phase=DevicePhase(_require(data, "device_phase", str)),
                lights_on=bool(_require(data, "lights_on", bool)),
                estop_latched=bool(_require(data, "estop_latched", bool)))
        if payload_type is LidarScanMsg:
            return LidarScanMsg(float(_require(data, "stamp", _NUM)),
                                float(_require(data, "angle_start", _NUM)),
                                float(_require(data, "angle_step", _NUM)),
                                float(_require(data, "max_range", _NUM)),
                                tuple(float(r) for r in _require(data, "ranges", list)))
        if payload_type is TrackSet:
            tracks = tuple(
                TrackState(int(t["track_id"]), tuple(float(v) for v in t["bbox"]),
                           int(t["hits"]), int(t["age"]),
                           int(t["time_since_update"]),
                           str(t.get("pose_class", "Unknown")))
                for t in _require(data, "tracks", list))
            target = data.get("target_id")
            return TrackSet(float(_require(data, "stamp", _NUM)), tracks,
                            None if target is None else int(target))
        if payload_type is PlannedPathMsg:
            return PlannedPathMsg(
                float(_require(data, "stamp", _NUM)),
                tuple((float(p[0]), float(p[1]))
                      for p in _require(data, "points", list)),
                float(_require(data, "total_cost", _NUM)))
        if payload_type is GridMsg:
            return GridMsg(float(_require(data, "stamp", _NUM)),
                           int(_require(data, "width", _NUM)),
                           int(_require(data, "height", _NUM)),
                           float(_require(data, "resolution", _NUM)),
                           _decode_pose(_require(data, "origin", dict)),
                           base64.b64decode(_require(data, "cells", str)))
    except WireError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise WireError(f"bad payload for topic {topic!r}: {exc}") from None
    raise WireError(f"no decoder for topic {topic!r}")


def encode_envelope(env: Envelope) -> dict:
    return {"topic": env.topic, "type": type(env.payload).__name__,
            "seq": env.seq, "stamp": env.stamp, "publisher": env.publisher,
            "payload": encode_payload(env.payload)}


# ---------------------------------------------------------------------------
# machine-readable schema
# ---------------------------------------------------------------------------

_FIELD_SPECS: dict[type, dict[str, str]] = {
    ActionRequest: {"kind": "string", "source": "string", "poi": "string?"},
    VelocityCommand: {"twist": "twist", "source": "string", "stamp": "number"},
    EstopCommand: {"latch": "boolean"},
    DeviceRequest: {"target": "string"},
    HelpReply: {"confirm": "boolean"},
    LightsRequest: {"on": "boolean"},
    UtteranceFrameMsg: {"stamp": "number", "energy": "number", "token": "string?"},
    VocalEvent: {"kind": "string", "text": "string", "stamp": "number"},
    RobotTelemetry: {"stamp": "number", "pose": "pose", "twist": "twist",
                     "commanded_twist": "twist", "wheel_speeds": "object",
                     "device_linear": "number", "device_tilt": "number",
                     "device_phase": "string", "lights_on": "boolean",
                     "estop_latched": "boolean"},
    LidarScanMsg: {"stamp": "number", "angle_start": "number",
                   "angle_step": "number", "max_range": "number",
                   "ranges": "number[]"},
    TrackSet: {"stamp": "number", "target_id": "number?", "tracks": "object[]"},
    PersonGoalMsg: {"x": "number", "y": "number", "stamp": "number"},
    NavGoal: {"pose": "pose", "speed_cap": "number?", "label": "string"},
    PlannedPathMsg: {"stamp": "number", "points": "number[][]",
                     "total_cost": "number"},
    GridMsg: {"stamp": "number", "width": "number", "height": "number",
              "resolution": "number", "origin": "pose", "cells": "base64"},
    Event: {"name": "string", "stamp": "number", "data": "object"},
}

_ENUMS = {
    "ActionRequest.kind": [k.value for k in ActionKind],
    "ActionRequest.source": [s.value for s in Source],
    "VelocityCommand.source": [s.value for s in Source],
    "DeviceRequest.target": ["Deploy", "Retract", "TiltForward", "TiltHome"],
    "RobotTelemetry.device_phase": [p.value for p in DevicePhase],
}


def protocol_spec() -> dict:
    topics = {}
    for name, payload_type in TOPICS.items():
        topics[name] = {
            "type": payload_type.__name__,
            "direction": "command" if name in COMMAND_TOPICS else "telemetry",
            "payload": _FIELD_SPECS[payload_type],
        }
    return {"version": WIRE_VERSION, "topics": topics, "enums": _ENUMS,
            "shapes": {"pose": {"x": "number", "y": "number", "yaw": "number"},
                       "twist": {"vx": "number", "vy": "number",
                                 "yaw_rate": "number"}}}


if __name__ == "__main__":
    print(json.dumps(protocol_spec(), indent=2, sort_keys=True))

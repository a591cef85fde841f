"""Service boundary: wire protocol, scenario runner, record/replay, server."""

from .protocol import (WIRE_VERSION, WireError, decode_payload,
                       encode_envelope, encode_payload, protocol_spec)
from .recorder import (LOG_VERSION, LogVersionError, Recorder, read_log,
                       replay_into_bus)
from .runner import CheckResult, ScenarioResult, run_scenario, run_stack

__all__ = [
    "WIRE_VERSION", "WireError", "decode_payload", "encode_envelope",
    "encode_payload", "protocol_spec",
    "LOG_VERSION", "LogVersionError", "Recorder", "read_log",
    "replay_into_bus",
    "CheckResult", "ScenarioResult", "run_scenario", "run_stack",
]

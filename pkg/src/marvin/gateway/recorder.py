"""Record and replay: every bus envelope as one JSON line."""

from __future__ import annotations

import json
import time
from pathlib import Path
from typing import Iterator

from ..bus import Bus, Envelope
from .protocol import decode_payload, encode_envelope

__all__ = ["LOG_VERSION", "LogVersionError", "Recorder", "read_log",
           "replay_into_bus"]

LOG_VERSION = "MARVINLOG v1"


class LogVersionError(ValueError):
    pass


class Recorder:
    """Attach to a bus tap; one JSON line per envelope, header line first."""

    def __init__(self, path: str | Path, scenario: str = "", seed: int = 0):
        self._file = open(path, "w", encoding="utf-8")
        header = {"format": LOG_VERSION, "scenario": scenario, "seed": seed}
        self._file.write(json.dumps(header, sort_keys=True) + "\n")

    def __call__(self, env: Envelope) -> None:
        self._file.write(json.dumps(encode_envelope(env), sort_keys=True) + "\n")

    def close(self) -> None:
        self._file.close()


def read_log(path: str | Path) -> tuple[dict, Iterator[dict]]:
    """Header plus a record iterator; stops cleanly at a truncated tail."""
    handle = open(path, "r", encoding="utf-8")
    first = handle.readline()
    try:
        header = json.loads(first)
    except json.JSONDecodeError:
        handle.close()
        raise LogVersionError("missing log header line")
    if header.get("format") != LOG_VERSION:
        handle.close()
        raise LogVersionError(
            f"log format {header.get('format')!r}, expected {LOG_VERSION!r}")

    def records() -> Iterator[dict]:
        with handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                try:
                    yield json.loads(line)
                except json.JSONDecodeError:
                    return  # truncated final line: stop at last full record

    return header, records()


def replay_into_bus(path: str | Path, bus: Bus, rate: float = 0.0,
                    topics: set[str] | None = None) -> int:
    """Republish recorded messages with their original stamps.

    rate > 0 paces the replay in wall time (rate x real time); rate == 0
    floods as fast as possible (tests). Returns the replayed message count.
    """
    _, records = read_log(path)
    count = 0
    last_stamp = None
    for rec in records:
        topic = rec.get("topic")
        if topics is not None and topic not in topics:
            continue
        payload = decode_payload(topic, rec.get("payload", {}))
        stamp = float(rec.get("stamp", 0.0))
        if rate > 0.0 and last_stamp is not None and stamp > last_stamp:
            time.sleep((stamp - last_stamp) / rate)
        last_stamp = stamp
        bus.publish(topic, payload, rec.get("publisher", "replay"), stamp)
        count += 1
    return count

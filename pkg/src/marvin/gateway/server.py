"""JSON-over-WebSocket bridge between the bus and external clients.

One socket per client at /ws. Client operations:
    {"op": "subscribe", "topics": [...]}
    {"op": "unsubscribe", "topics": [...]}
    {"op": "publish", "topic": ..., "payload": {...}}
    {"op": "schema"}
Server frames:
    {"op": "hello", "version": ...}
    {"op": "message", "message": <wire envelope>}
    {"op": "schema", "schema": {...}}
    {"op": "error", "error": ..., "detail": ...}

Clients may publish only on command topics; inbound stamps on velocity and
utterance messages are rewritten to the simulation clock.
"""

from __future__ import annotations

import asyncio
import dataclasses
import json
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..bus import Bus, Envelope, SchemaError
from ..messages import COMMAND_TOPICS, TOPICS, UtteranceFrameMsg, VelocityCommand
from .protocol import WIRE_VERSION, WireError, decode_payload, encode_envelope, protocol_spec

__all__ = ["create_app"]

CLIENT_QUEUE_DEPTH = 512


def create_app(bus: Bus, clock: Callable[[], float] = lambda: 0.0,
               static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="marvin gateway")

    @app.get("/schema")
    def schema() -> JSONResponse:
        return JSONResponse(protocol_spec())

    @app.websocket("/ws")
    async def websocket(ws: WebSocket) -> None:
        await ws.accept()
        await ws.send_text(json.dumps({"op": "hello", "version": WIRE_VERSION,
                                       "topics": sorted(TOPICS)}))
        loop = asyncio.get_running_loop()
        queue: asyncio.Queue = asyncio.Queue(maxsize=CLIENT_QUEUE_DEPTH)
        topics: set[str] = set()

        def tap(env: Envelope) -> None:
            if env.topic not in topics:
                return
            encoded = encode_envelope(env)

            def push() -> None:
                if queue.full():
                    try:
                        queue.get_nowait()  # drop oldest for slow clients
                    except asyncio.QueueEmpty:
                        pass
                queue.put_nowait(encoded)

            loop.call_soon_threadsafe(push)

        bus.add_tap(tap)

        async def pump() -> None:
            while True:
                message = await queue.get()
                await ws.send_text(json.dumps({"op": "message",
                                               "message": message}))

        pump_task = asyncio.create_task(pump())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    request = json.loads(raw)
                except json.JSONDecodeError as exc:
                    await ws.send_text(json.dumps(
                        {"op": "error", "error": "bad-json", "detail": str(exc)}))
                    continue
                op = request.get("op")
                if op == "subscribe":
                    wanted = set(request.get("topics") or [])
                    unknown = wanted - set(TOPICS)
                    if unknown:
                        await ws.send_text(json.dumps(
                            {"op": "error", "error": "unknown-topic",
                             "detail": sorted(unknown)}))
                    topics.update(wanted & set(TOPICS))
                elif op == "unsubscribe":
                    topics.difference_update(set(request.get("topics") or []))
                elif op == "schema":
                    await ws.send_text(json.dumps({"op": "schema",
                                                   "schema": protocol_spec()}))
                elif op == "publish":
                    topic = request.get("topic")
                    if topic not in COMMAND_TOPICS:
                        await ws.send_text(json.dumps(
                            {"op": "error", "error": "not-a-command-topic",
                             "detail": topic}))
                        continue
                    try:
                        payload = decode_payload(topic, request.get("payload"))
                    except WireError as exc:
                        await ws.send_text(json.dumps(
                            {"op": "error", "error": "schema-error",
                             "detail": str(exc)}))
                        continue
                    now = clock()
                    if isinstance(payload, (VelocityCommand, UtteranceFrameMsg)):
                        payload = dataclasses.replace(payload, stamp=now)
                    try:
                        bus.publish(topic, payload, publisher="gateway", stamp=now)
                    except SchemaError as exc:
                        await ws.send_text(json.dumps(
                            {"op": "error", "error": "schema-error",
                             "detail": str(exc)}))
                else:
                    await ws.send_text(json.dumps(
                        {"op": "error", "error": "unknown-op", "detail": op}))
        except WebSocketDisconnect:
            pass
        finally:
            bus.remove_tap(tap)
            pump_task.cancel()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="console")
    return app

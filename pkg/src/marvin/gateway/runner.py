"""Headless scenario execution and assertion judging."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..config import MarvinConfig, load_config
from ..kinematics import wrap_angle
from ..messages import Event
from ..runtime import Stack
from ..worldsim import Scenario, load_scenario
from .recorder import Recorder

__all__ = ["CheckResult", "ScenarioResult", "run_scenario", "run_stack"]


@dataclass(frozen=True)
class CheckResult:
    description: str
    passed: bool
    detail: str = ""


@dataclass
class ScenarioResult:
    scenario: str
    passed: bool
    checks: list[CheckResult]
    events: list[Event]
    sim_time: float
    wall_time: float
    event_log: bytes

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


@dataclass
class _MetricSample:
    t: float
    robot_x: float
    robot_y: float
    robot_yaw: float
    cmd_vx: float
    cmd_vy: float
    cmd_w: float
    person_dist: float | None
    person_heading_err: float | None


def _sample_metrics(stack: Stack) -> _MetricSample:
    pose = stack.world.robot.pose
    cmd = stack.serial.commanded
    dist = heading = None
    if stack.world.persons:
        person = stack.world.persons[0].pose
        dx, dy = person.x - pose.x, person.y - pose.y
        dist = math.hypot(dx, dy)
        heading = abs(wrap_angle(math.atan2(dy, dx) - pose.yaw))
    return _MetricSample(stack.time, pose.x, pose.y, pose.yaw,
                         cmd.vx, cmd.vy, cmd.yaw_rate, dist, heading)


def _evaluate(assertion, events: list[Event],
              samples: list[_MetricSample]) -> CheckResult:
    kind = assertion.type
    p = assertion.params

    if kind == "event":
        name = p["name"]
        after = float(p.get("after", -math.inf))
        before = float(p.get("before", math.inf))
        count = sum(1 for e in events if e.name == name and after <= e.stamp <= before)
        need = int(p.get("count_min", 1))
        ok = count >= need
        return CheckResult(f"event {name} in [{after}, {before}]", ok,
                           f"saw {count}, need >= {need}")
    if kind == "no_event":
        name = p["name"]
        count = sum(1 for e in events if e.name == name)
        return CheckResult(f"no {name} events", count == 0, f"saw {count}")
    if kind == "order":
        # log position decides: same-tick events keep their emission order
        first, then = p["first"], p["then"]
        i_first = next((i for i, e in enumerate(events) if e.name == first), None)
        i_then = next((i for i, e in enumerate(events) if e.name == then), None)
        ok = i_first is not None and i_then is not None and i_first < i_then
        return CheckResult(f"order {first} < {then}", ok,
                           f"{first}#{i_first} {then}#{i_then}")
    if kind == "standoff_band":
        lo, hi = float(p["min"]), float(p["max"])
        after = float(p.get("after", 0.0))
        frac = float(p.get("frac", 0.9))
        window = [s for s in samples if s.t >= after and s.person_dist is not None]
        if not window:
            return CheckResult("standoff band", False, "no samples")
        inside = sum(1 for s in window if lo <= s.person_dist <= hi)
        ratio = inside / len(window)
        return CheckResult(f"standoff in [{lo}, {hi}] for {frac:.0%} after {after}s",
                           ratio >= frac, f"ratio {ratio:.3f}")
    if kind == "heading_error":
        limit = float(p["max"])
        after = float(p.get("after", 0.0))
        frac = float(p.get("frac", 0.9))
        window = [s for s in samples
                  if s.t >= after and s.person_heading_err is not None]
        if not window:
            return CheckResult("heading error", False, "no samples")
        good = sum(1 for s in window if s.person_heading_err <= limit)
        ratio = good / len(window)
        return CheckResult(f"heading error <= {limit} rad for {frac:.0%} after {after}s",
                           ratio >= frac, f"ratio {ratio:.3f}")
    if kind == "estop_zero_next_tick":
        latch_times = [e.stamp for e in events if e.name == "EstopSet"]
        if not latch_times:
            return CheckResult("estop zero next tick", False, "no EstopSet event")
        worst = 0.0
        for t0 in latch_times:
            later = [s for s in samples if s.t > t0 + 1e-9]
            if not later:
                continue
            nxt = later[0]
            worst = max(worst, abs(nxt.cmd_vx), abs(nxt.cmd_vy), abs(nxt.cmd_w))
        return CheckResult("commanded twist zero on the tick after e-stop",
                           worst == 0.0, f"worst |cmd| {worst}")
    return CheckResult(f"unknown assertion {kind!r}", False, "unsupported type")


def run_stack(stack: Stack, scenario: Scenario,
              record: str | Path | None = None,
              seed: int = 0) -> ScenarioResult:
    events: list[Event] = []
    sub = stack.bus.subscribe("events", maxlen=100_000)
    recorder = None
    if record is not None:
        recorder = Recorder(record, scenario=scenario.name, seed=seed)
        stack.bus.add_tap(recorder)

    samples: list[_MetricSample] = []
    started = time.perf_counter()
    while stack.time < scenario.horizon - 1e-9:
        stack.step()
        samples.append(_sample_metrics(stack))
        events.extend(env.payload for env in sub)
    wall = time.perf_counter() - started
    if recorder is not None:
        recorder.close()

    log_lines = [json.dumps({"name": e.name, "stamp": e.stamp, "data": e.data},
                            sort_keys=True) for e in events]
    log_bytes = ("\n".join(log_lines) + "\n").encode() if log_lines else b""

    checks = [_evaluate(a, events, samples) for a in scenario.assertions]
    return ScenarioResult(
        scenario=scenario.name,
        passed=all(c.passed for c in checks),
        checks=checks,
        events=events,
        sim_time=stack.time,
        wall_time=wall,
        event_log=log_bytes,
    )


def run_scenario(path: str | Path, seed: int = 0,
                 record: str | Path | None = None,
                 cfg: MarvinConfig | None = None) -> ScenarioResult:
    scenario = load_scenario(path)
    stack = Stack(scenario, cfg or load_config(), seed=seed)
    return run_stack(stack, scenario, record=record, seed=seed)

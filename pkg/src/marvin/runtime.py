"""Node wiring: the whole stack running against the simulator.

Single-threaded: one Stack.step() advances scripted inputs, the vocal,
task, perception, mapping and navigation nodes, the serial/low layer, and
finally the world, all on the 50 Hz simulation clock.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .bus import Bus, EstopLatch, arbitrate_velocity
from .config import MarvinConfig
from .kinematics import (Pose2D, Twist2D, clamp_to_octahedron,
                         forward_kinematics, inverse_kinematics, wrap_angle)
from .lowlayer import DeviceBusyError, DeviceTarget, LowLayer, PidGains, WheelPlant
from .messages import (ActionKind, ActionRequest, Event, GridMsg, NavGoal,
                       PersonGoalMsg, PlannedPathMsg, Source, TrackSet,
                       TrackState, UtteranceFrameMsg, VelocityCommand,
                       VocalEvent, RobotTelemetry)
from .nav import (FollowController, FollowerParams, MapperState, NoPathError,
                  build_costmap, follow_path, mapper_update, plan)
from .perception import (CameraModel, FallMonitor, PoseClass, SortTracker,
                         TrackerParams, classify_pose, project_goal,
                         select_target, synth_detect)
from .taskmgr import PoiRegistry, TaskManager
from .vocal import IntentCatalogue, UtteranceFrame, VocalPipeline
from .worldsim import Scenario, World

__all__ = ["Stack", "default_catalogue_path"]


def default_catalogue_path():
    from pathlib import Path
    return Path(__file__).resolve().parent.parent.parent / "data" / "catalogue.yaml"


class VocalNode:
    NODE = "vocal"

    def __init__(self, bus: Bus, pipeline: VocalPipeline):
        self.bus = bus
        self.pipeline = pipeline
        self._frames = bus.subscribe("utterance_frames", maxlen=256)

    def tick(self, now: float) -> None:
        for env in self._frames:
            msg: UtteranceFrameMsg = env.payload
            out = self.pipeline.process_frame(
                UtteranceFrame(msg.stamp, msg.energy, msg.token))
            if out.triggered:
                self.bus.publish("vocal_events",
                                 VocalEvent("triggered", self.pipeline.catalogue.trigger_word, now),
                                 self.NODE, now)
            if out.utterance is None:
                continue
            if out.truncated:
                self.bus.publish("vocal_events",
                                 VocalEvent("warning", "utterance truncated", now),
                                 self.NODE, now)
            self.bus.publish("events",
                             Event("UtteranceCaptured", now,
                                   {"text": out.utterance}), self.NODE, now)
            action = out.match.to_action() if out.match else None
            if action is not None:
                self.bus.publish("actions", action, self.NODE, now)
            else:
                self.bus.publish("events", Event("NotUnderstood", now,
                                                 {"text": out.utterance}),
                                 self.NODE, now)
            if out.response:
                self.bus.publish("vocal_events",
                                 VocalEvent("response" if action else "not_understood",
                                            out.response, now),
                                 self.NODE, now)


class PerceptionNode:
    NODE = "perception"

    def __init__(self, bus: Bus, world: World, cfg: MarvinConfig, seed: int):
        self.bus = bus
        self.world = world
        self.cfg = cfg
        self.rng = np.random.default_rng(seed)
        self.tracker = SortTracker(TrackerParams(
            cfg.perception.iou_threshold, cfg.perception.max_age,
            cfg.perception.min_hits))
        self.monitor = FallMonitor(cfg.perception.fall_window,
                                   cfg.perception.fall_fraction,
                                   cfg.perception.rearm_fraction)
        self.classes: dict[int, str] = {}

    def _camera(self, device) -> CameraModel:
        return CameraModel.from_config(self.cfg.camera,
                                       lift=device.linear_pos,
                                       tilt_deg=device.tilt_pos)

    def tick(self, now: float, device) -> None:
        camera = self._camera(device)
        pose = self.world.robot.pose
        detections = synth_detect(self.world.persons, self.world.grid, pose,
                                  camera, rng=self.rng,
                                  noise_sigma=self.cfg.camera.pixel_noise_sigma)
        boxes = [det.keypoints.bbox() for det in detections]
        tracks = self.tracker.update(boxes)

        alive = {t.id for t in tracks}
        self.classes = {i: c for i, c in self.classes.items() if i in alive}
        for trk in tracks:
            if trk.last_det is not None:
                cls = classify_pose(detections[trk.last_det].keypoints,
                                    self.cfg.perception.min_joint_confidence)
                self.classes[trk.id] = cls.value

        target = select_target(tracks, self.cfg.perception.min_hits)
        snapshot = TrackSet(
            stamp=now,
            tracks=tuple(TrackState(t.id, tuple(float(v) for v in t.bbox),
                                    t.hits, t.age, t.time_since_update,
                                    self.classes.get(t.id, "Unknown"))
                         for t in tracks),
            target_id=target)
        self.bus.publish("tracks", snapshot, self.NODE, now)

        if target is None:
            return
        trk = next(t for t in tracks if t.id == target)
        if trk.last_det is None:
            return
        det = detections[trk.last_det]
        depth = det.torso_depth
        if 0.0 < depth <= camera.max_depth:
            goal = project_goal(det.keypoints, depth, camera, stamp=now)
            self.bus.publish("person_goal", goal, self.NODE, now)
        cls = self.classes.get(target)
        if cls:
            if self.monitor.push(now, PoseClass(cls)):
                self.bus.publish("events", Event("FallAlarm", now,
                                                 {"track_id": target}),
                                 self.NODE, now)
                self.bus.publish("actions",
                                 ActionRequest(ActionKind.HELP_REQUEST,
                                               Source.MONITOR),
                                 self.NODE, now)


class TaskNode:
    """Thin bus adapter around the task manager."""

    def __init__(self, bus: Bus, manager: TaskManager):
        self.bus = bus
        self.manager = manager
        self._actions = bus.subscribe("actions")
        self._replies = bus.subscribe("help_reply")
        self._events = bus.subscribe("events", maxlen=256)

    def tick(self, now: float) -> None:
        for env in self._events:
            if env.payload.name == "GoalReached":
                self.manager.on_goal_reached(now)
        for env in self._actions:
            self.manager.on_action(env.payload, now)
        for env in self._replies:
            self.manager.on_help_reply(env.payload.confirm, now)
        self.manager.tick(now)


class NavNode:
    NODE = "nav"

    def __init__(self, bus: Bus, world: World, cfg: MarvinConfig):
        self.bus = bus
        self.world = world
        self.cfg = cfg
        self._goals = bus.subscribe("nav_goal")
        self._person = bus.subscribe("person_goal")
        self.mode = "idle"
        self.goal: NavGoal | None = None
        self.path = None
        self.last_scan = None
        self.next_replan = 0.0
        self.follow = FollowController(
            FollowerParams.from_config(cfg.chassis, cfg.nav,
                                       v_max=cfg.limits.v_max,
                                       a_max=cfg.limits.a_max),
            stale_after=cfg.nav.goal_stale_after,
            search_timeout=cfg.nav.search_timeout)
        self._goal_event_sent = False

    def on_scan(self, scan) -> None:
        self.last_scan = scan

    def _params(self, speed_cap: float | None) -> FollowerParams:
        return FollowerParams.from_config(self.cfg.chassis, self.cfg.nav,
                                          v_max=self.cfg.limits.v_max,
                                          a_max=self.cfg.limits.a_max,
                                          speed_cap=speed_cap)

    def _publish_cmd(self, twist: Twist2D, now: float) -> None:
        self.bus.publish("cmd_vel_auto",
                         VelocityCommand(twist, Source.AUTONOMOUS, now),
                         self.NODE, now)

    def _replan(self, now: float) -> None:
        if self.last_scan is None or self.goal is None:
            return
        pose = self.world.robot.pose
        costmap = build_costmap(self.last_scan, pose, self.cfg.nav)
        gx, gy = costmap.clamp_inside(self.goal.pose.x, self.goal.pose.y)
        try:
            self.path = plan(costmap, (pose.x, pose.y), (gx, gy))
        except (ValueError, NoPathError) as exc:
            self.path = None
            self.bus.publish("events", Event("NavBlocked", now,
                                             {"reason": str(exc)}),
                             self.NODE, now)
            return
        self.bus.publish("planned_path",
                         PlannedPathMsg(now, self.path.points,
                                        self.path.total_cost),
                         self.NODE, now)
        self.bus.publish(
            "costmap_grid",
            GridMsg(now, costmap.width, costmap.height, costmap.resolution,
                    costmap.origin, costmap.cells.tobytes()),
            self.NODE, now)

    def tick(self, now: float) -> None:
        for env in self._goals:
            goal: NavGoal = env.payload
            if goal.label == "abort":
                self.mode = "idle"
                self.goal = None
                self.path = None
                self.follow.reset(now)
                self._publish_cmd(Twist2D(0, 0, 0), now)
            elif goal.label == "follow":
                self.mode = "follow"
                self.goal = None
                self.path = None
                self.follow.reset(now)
            else:
                self.mode = "pose"
                self.goal = goal
                self.path = None
                self.next_replan = now
                self._goal_event_sent = False

        pose = self.world.robot.pose
        if self.mode == "pose":
            if now >= self.next_replan:
                self._replan(now)
                self.next_replan = now + self.cfg.nav.replan_period
            if self.path is None:
                self._publish_cmd(Twist2D(0, 0, 0), now)
                return
            params = self._params(self.goal.speed_cap)
            true_goal = self.goal.pose
            dist_true = math.hypot(true_goal.x - pose.x, true_goal.y - pose.y)
            twist, reached_window = follow_path(self.path.points, pose, params)
            if dist_true <= params.goal_tolerance:
                self._publish_cmd(Twist2D(0, 0, 0), now)
                if not self._goal_event_sent:
                    self.bus.publish("events", Event("GoalReached", now,
                                                     {"label": self.goal.label}),
                                     self.NODE, now)
                    self._goal_event_sent = True
                return
            if reached_window and dist_true > params.goal_tolerance:
                self.next_replan = now  # window goal only; extend the path
            self._publish_cmd(twist, now)
        elif self.mode == "follow":
            goal = None
            for env in self._person:
                goal = env.payload
            status = self.follow.update(goal, pose, now)
            if status.timed_out:
                self.bus.publish("events", Event("SearchTimeout", now, {}),
                                 self.NODE, now)
            self._publish_cmd(status.twist, now)
        else:
            for _ in self._person:
                pass


class MapperNode:
    NODE = "mapper"

    def __init__(self, bus: Bus, world: World, cfg: MarvinConfig):
        self.bus = bus
        self.cfg = cfg
        grid = world.grid
        self.state = MapperState.from_config(grid.width, grid.height,
                                             grid.resolution, grid.origin,
                                             cfg.nav)
        self._last_publish = -math.inf

    def on_scan(self, pose: Pose2D, scan, now: float) -> None:
        mapper_update(self.state, pose, scan)
        if now - self._last_publish >= 1.0:
            grid = self.state.to_occupancy(self.cfg.nav.p_occupied,
                                           self.cfg.nav.p_free)
            self.bus.publish(
                "map_grid",
                GridMsg(now, grid.width, grid.height, grid.resolution,
                        grid.origin, grid.cells.tobytes()),
                self.NODE, now)
            self._last_publish = now


class SerialNode:
    """Arbitration plus the simulated MCU: the only writer of wheel targets."""

    NODE = "serial"

    def __init__(self, bus: Bus, world: World, cfg: MarvinConfig):
        self.bus = bus
        self.world = world
        self.cfg = cfg
        self.low = LowLayer(PidGains.from_config(cfg.pid),
                            [WheelPlant.from_config(cfg.plant) for _ in range(4)])
        self.estop = EstopLatch(bus)
        self._manual = bus.subscribe("cmd_vel_manual")
        self._auto = bus.subscribe("cmd_vel_auto")
        self._estop = bus.subscribe("estop")
        self._device = bus.subscribe("device_request")
        self._lights = bus.subscribe("lights_request")
        self.manual_cmd: VelocityCommand | None = None
        self.auto_cmd: VelocityCommand | None = None
        self.commanded = Twist2D()

    def drain_estop(self, now: float) -> None:
        for env in self._estop:
            if env.payload.latch:
                self.estop.set(now)
                self.bus.publish("events", Event("EstopSet", now, {}),
                                 self.NODE, now)
            else:
                self.estop.reset()
                self.bus.publish("events", Event("EstopReset", now, {}),
                                 self.NODE, now)

    def tick(self, now: float, dt: float) -> RobotTelemetry:
        for env in self._manual:
            self.manual_cmd = env.payload
        for env in self._auto:
            self.auto_cmd = env.payload
        for env in self._device:
            try:
                self.low.device.command(DeviceTarget(env.payload.target))
            except (ValueError, DeviceBusyError) as exc:
                self.bus.publish("events", Event("DeviceRejected", now,
                                                 {"reason": str(exc)}),
                                 self.NODE, now)
        for env in self._lights:
            self.low.set_lights(env.payload.on)

        raw = arbitrate_velocity(self.manual_cmd, self.auto_cmd,
                                 self.estop.latched, now,
                                 self.cfg.bus.manual_timeout,
                                 self.cfg.bus.auto_timeout)
        self.commanded = clamp_to_octahedron(self.cfg.chassis, raw)
        targets = inverse_kinematics(self.cfg.chassis, self.commanded)
        telem = self.low.tick(targets, dt)
        achieved = forward_kinematics(self.cfg.chassis, telem.wheel_speeds)
        self.world.command_robot(achieved)

        message = RobotTelemetry(
            stamp=now,
            pose=self.world.robot.pose,
            twist=self.world.robot.twist,
            commanded_twist=self.commanded,
            wheel_speeds=telem.wheel_speeds,
            device_linear=telem.device.linear_pos,
            device_tilt=telem.device.tilt_pos,
            device_phase=telem.device.phase,
            lights_on=telem.lights_on,
            estop_latched=self.estop.latched,
        )
        self.bus.publish("telemetry", message, self.NODE, now)
        return message


@dataclass(frozen=True)
class _Injection:
    t: float
    topic: str
    payload: object


def _expand_inputs(scenario: Scenario) -> list[_Injection]:
    out: list[_Injection] = []
    for utt in scenario.utterances:
        words = utt.say.split()
        frame_dt = 0.1
        for i, word in enumerate(words):
            t = utt.t + i * frame_dt
            out.append(_Injection(t, "utterance_frames",
                                  UtteranceFrameMsg(t, 0.8, word)))
        for j in range(12):   # silence tail closes the endpointing hold
            t = utt.t + (len(words) + j) * frame_dt
            out.append(_Injection(t, "utterance_frames",
                                  UtteranceFrameMsg(t, 0.02, None)))
    for act in scenario.actions:
        out.append(_Injection(act.t, "actions",
                              ActionRequest(ActionKind(act.kind),
                                            Source(act.source),
                                            poi=act.poi)))
    for stop in scenario.estops:
        from .messages import EstopCommand
        out.append(_Injection(stop.t, "estop", EstopCommand(stop.latch)))
    for reply in scenario.help_replies:
        from .messages import HelpReply
        out.append(_Injection(reply.t, "help_reply", HelpReply(reply.confirm)))
    out.sort(key=lambda inj: inj.t)
    return out


class Stack:
    """Everything wired to one bus against one simulated world."""

    def __init__(self, scenario: Scenario, cfg: MarvinConfig | None = None,
                 seed: int = 0, catalogue: IntentCatalogue | None = None,
                 enable_mapper: bool = True):
        self.cfg = cfg or MarvinConfig()
        self.scenario = scenario
        self.seed = seed
        sim_cfg = replace(self.cfg.sim,
                          lidar_noise_sigma=scenario.lidar_noise_sigma)
        self.world = World(scenario.grid, scenario.robot_start,
                           persons=scenario.persons,
                           limits=self.cfg.limits, sim=sim_cfg, seed=seed)
        self.bus = Bus(queue_depth=self.cfg.bus.queue_depth)

        pois = dict(scenario.pois)
        pois.setdefault("dock", scenario.robot_start)
        self.pois = PoiRegistry(pois)

        catalogue = catalogue or IntentCatalogue.load(default_catalogue_path())
        pipeline = VocalPipeline(catalogue, self.cfg.vocal,
                                 poi_names=self.pois.names())
        self.vocal = VocalNode(self.bus, pipeline)
        self.taskmgr = TaskManager(self.bus, self.pois,
                                   help_timeout=self.cfg.vocal.help_confirm_timeout,
                                   night_speed_cap=self.cfg.nav.night_speed_cap)
        self.task_node = TaskNode(self.bus, self.taskmgr)
        self.perception = PerceptionNode(self.bus, self.world, self.cfg,
                                         seed=seed + 1)
        self.nav = NavNode(self.bus, self.world, self.cfg)
        self.mapper = MapperNode(self.bus, self.world, self.cfg) if enable_mapper else None
        self.serial = SerialNode(self.bus, self.world, self.cfg)

        self._pending = _expand_inputs(scenario)
        self._sensor_divider = max(1, int(round(
            1.0 / (self.cfg.bus.perception_rate * self.cfg.sim.tick))))

    @property
    def time(self) -> float:
        return self.world.time

    def _inject_due(self, now: float) -> None:
        while self._pending and self._pending[0].t <= now + 1e-9:
            inj = self._pending.pop(0)
            self.bus.publish(inj.topic, inj.payload, "script", now)

    def step(self) -> None:
        now = self.world.time
        dt = self.cfg.sim.tick
        self._inject_due(now)
        self.vocal.tick(now)
        self.serial.drain_estop(now)
        self.task_node.tick(now)
        if self.world.tick_count % self._sensor_divider == 0:
            self.perception.tick(now, self.serial.low.device.state)
            scan = self.world.scan_lidar()
            from .messages import LidarScanMsg
            self.bus.publish("lidar",
                             LidarScanMsg(now, scan.angle_start,
                                          scan.angle_step, scan.max_range,
                                          tuple(float(r) for r in scan.ranges)),
                             "lidar", now)
            self.nav.on_scan(scan)
            if self.mapper is not None:
                self.mapper.on_scan(self.world.robot.pose, scan, now)
        self.nav.tick(now)
        self.serial.tick(now, dt)
        for name in self.world.step(dt):
            stamp = self.world.time
            if name == "collision":
                self.bus.publish("events", Event("Collision", stamp, {}),
                                 "world", stamp)
            elif name.startswith("person:"):
                _, person, action = name.split(":", 2)
                event_name = "PersonFall" if action == "fall" else "PersonEvent"
                self.bus.publish("events",
                                 Event(event_name, stamp,
                                       {"person": person, "action": action}),
                                 "world", stamp)

    def run(self, horizon: float | None = None) -> None:
        horizon = horizon if horizon is not None else self.scenario.horizon
        while self.world.time < horizon - 1e-9:
            self.step()

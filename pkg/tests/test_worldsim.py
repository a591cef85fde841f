import math
import textwrap

import numpy as np
import pytest

from marvin.config import MotionLimits
from marvin.kinematics import Pose2D, Twist2D
from marvin.worldsim import (
    FREE,
    OCCUPIED,
    InvalidStateError,
    LidarSpec,
    OccupancyGrid,
    PersonAgent,
    ScenarioParseError,
    ScriptEvent,
    World,
    WorldParseError,
    load_scenario,
    raycast_lidar,
)

BOX_WORLD = textwrap.dedent("""\
    MARVINWORLD v1
    resolution 0.1

    ####################
    #..................#
    #..................#
    #..................#
    #..................#
    #..................#
    #..................#
    #..................#
    #..................#
    ####################
""")


def box_grid():
    return OccupancyGrid.from_ascii(BOX_WORLD)


class TestGrid:
    def test_ascii_round_trip(self):
        grid = box_grid()
        again = OccupancyGrid.from_ascii(grid.to_ascii())
        assert np.array_equal(grid.cells, again.cells)
        assert again.resolution == 0.1

    def test_dimensions_and_lookup(self):
        grid = box_grid()
        assert (grid.width, grid.height) == (20, 10)
        assert grid.occupied_at(0.05, 0.05)      # border wall
        assert not grid.occupied_at(1.0, 0.5)    # interior
        assert grid.occupied_at(-1.0, -1.0)      # outside counts occupied

    def test_row_zero_is_bottom(self):
        text = "MARVINWORLD v1\nresolution 1.0\n\n..\n#.\n"
        grid = OccupancyGrid.from_ascii(text)
        assert grid.cells[0, 0] == OCCUPIED      # last text row = bottom
        assert grid.cells[1, 0] == FREE

    def test_parse_errors_carry_line(self):
        with pytest.raises(WorldParseError):
            OccupancyGrid.from_ascii("not a world\n")
        with pytest.raises(WorldParseError) as err:
            OccupancyGrid.from_ascii("MARVINWORLD v1\nresolution 0.1\n\n##\n#\n")
        assert err.value.line == 5


class TestRobotBody:
    def test_acceleration_limit(self):
        world = World(box_grid(), Pose2D(1.0, 0.5, 0.0),
                      limits=MotionLimits(a_max=1.0))
        world.command_robot(Twist2D(1.5, 0, 0))
        for _ in range(50):  # 1.0 s at 50 Hz
            world.step(0.02)
        assert world.robot.twist.vx == pytest.approx(1.0, abs=1e-9)

    def test_per_tick_slew_bound(self):
        # collision-free ticks only: hitting a wall legitimately zeroes
        # the blocked axis in one tick
        world = World(box_grid(), Pose2D(1.0, 0.5, 0.0),
                      limits=MotionLimits(a_max=1.0))
        rng = np.random.default_rng(4)
        prev = world.robot.twist
        for _ in range(200):
            world.command_robot(Twist2D(*rng.uniform(-1.5, 1.5, size=2),
                                        rng.uniform(-2, 2)))
            events = world.step(0.02)
            cur = world.robot.twist
            if "collision" not in events:
                assert abs(cur.vx - prev.vx) <= 1.0 * 0.02 + 1e-12
                assert abs(cur.vy - prev.vy) <= 1.0 * 0.02 + 1e-12
                assert abs(cur.yaw_rate - prev.yaw_rate) <= 4.0 * 0.02 + 1e-12
            prev = cur

    def test_drive_into_wall_stops_with_event(self):
        world = World(box_grid(), Pose2D(1.0, 0.5, 0.0))
        world.command_robot(Twist2D(1.0, 0, 0))
        collided = False
        for _ in range(300):
            events = world.step(0.02)
            collided |= "collision" in events
            assert not world.robot.footprint_collides(world.grid,
                                                      world.robot.pose)
        assert collided
        # wall at x = 1.9, footprint half-length 0.3
        assert world.robot.pose.x <= 1.9 - 0.3 + 1e-6
        assert world.robot.twist.vx == 0.0

    def test_footprint_never_penetrates_random_drive(self):
        world = World(box_grid(), Pose2D(1.0, 0.5, 0.0))
        rng = np.random.default_rng(12)
        for k in range(500):
            if k % 25 == 0:
                world.command_robot(Twist2D(*rng.uniform(-1.5, 1.5, size=2),
                                            rng.uniform(-3, 3)))
            world.step(0.02)
            assert not world.robot.footprint_collides(world.grid,
                                                      world.robot.pose)

    def test_bad_start_pose_rejected(self):
        with pytest.raises(ValueError):
            World(box_grid(), Pose2D(0.05, 0.05, 0.0))


class TestPersons:
    def test_fall_script(self):
        person = PersonAgent("p", Pose2D(1.0, 0.5, 0.0), speed=0.0,
                             events=[ScriptEvent(t=5.0, action="fall")])
        world = World(box_grid(), Pose2D(1.5, 0.5, 0.0), persons=[person])
        fell_at = None
        for _ in range(500):
            events = world.step(0.02)
            if any("fall" in e for e in events):
                fell_at = world.time
            if world.time >= 5.0:
                assert person.posture == "Laying"
        assert fell_at == pytest.approx(5.02, abs=0.03)

    def test_waypoint_walk(self):
        person = PersonAgent("p", Pose2D(0.5, 0.5, 0.0), speed=1.0,
                             waypoints=[(1.5, 0.5), (1.5, 0.8)])
        world = World(box_grid(), Pose2D(1.0, 0.45, 0.0), persons=[person])
        for _ in range(100):  # 2 s
            world.step(0.02)
        assert person.pose.x == pytest.approx(1.5, abs=1e-6)
        assert person.pose.y == pytest.approx(0.8, abs=1e-6)

    def test_loop_walk_keeps_going(self):
        person = PersonAgent("p", Pose2D(0.5, 0.5, 0.0), speed=1.0,
                             waypoints=[(1.5, 0.5), (0.5, 0.5)], loop=True)
        world = World(box_grid(), Pose2D(1.0, 0.45, 0.0), persons=[person])
        for _ in range(1000):
            world.step(0.02)
            assert 0.4 <= person.pose.x <= 1.6


class TestLidar:
    def test_empty_world_max_range(self):
        grid = OccupancyGrid.empty(300, 300, 0.1)  # 30 x 30 m, no walls
        scan = raycast_lidar(grid, Pose2D(15.0, 15.0, 0.0), LidarSpec(max_range=8.0))
        assert np.all(scan.ranges == 8.0)
        assert len(scan.ranges) == 360

    def test_wall_ahead_range(self):
        grid = OccupancyGrid.empty(100, 100, 0.1)
        grid.cells[:, 50] = OCCUPIED  # wall at x = 5.0 .. 5.1
        scan = raycast_lidar(grid, Pose2D(3.0, 5.0, 0.0), LidarSpec(max_range=8.0))
        assert scan.ranges[0] == pytest.approx(2.0, abs=0.1)

    def test_pose_inside_wall_raises(self):
        grid = OccupancyGrid.empty(10, 10, 0.1, fill=OCCUPIED)
        with pytest.raises(InvalidStateError):
            raycast_lidar(grid, Pose2D(0.5, 0.5, 0.0), LidarSpec())

    def test_noise_seeded_and_clipped(self):
        grid = OccupancyGrid.empty(100, 100, 0.1)
        grid.cells[:, 80] = OCCUPIED
        spec = LidarSpec(max_range=8.0, noise_sigma=0.01)
        a = raycast_lidar(grid, Pose2D(4.0, 5.0, 0.0), spec,
                          rng=np.random.default_rng(7))
        b = raycast_lidar(grid, Pose2D(4.0, 5.0, 0.0), spec,
                          rng=np.random.default_rng(7))
        assert np.array_equal(a.ranges, b.ranges)
        assert np.all(a.ranges <= 8.0)
        assert np.all(a.ranges > 0.0)


class TestDeterminism:
    def build(self):
        person = PersonAgent("p", Pose2D(0.6, 0.6, 0.0), speed=0.7,
                             waypoints=[(1.6, 0.6), (0.6, 0.6)], loop=True,
                             events=[ScriptEvent(t=3.0, action="fall")])
        return World(box_grid(), Pose2D(1.0, 0.4, 0.0), persons=[person], seed=9)

    def test_identical_runs_bit_exact(self):
        runs = []
        for _ in range(2):
            world = self.build()
            log = []
            for k in range(400):
                if k == 50:
                    world.command_robot(Twist2D(0.4, 0.1, 0.3))
                log.append(world.step(0.02))
                log.append((world.robot.pose, world.robot.twist,
                            world.persons[0].pose, world.persons[0].posture))
            runs.append(log)
        assert runs[0] == runs[1]


class TestScenarioParsing:
    def test_parse_inline_world(self, tmp_path):
        scn = tmp_path / "t.scn"
        scn.write_text(textwrap.dedent("""\
            MARVINSCN v1
            name: demo
            horizon: 12.5
            world_inline: |
              MARVINWORLD v1
              resolution 0.1

              #####
              #...#
              #####
            robot:
              start: {x: 0.25, y: 0.15, yaw: 0.0}
            pois:
              Dock: {x: 0.3, y: 0.15}
            persons:
              - name: resident
                start: {x: 0.35, y: 0.15}
                speed: 0.5
                events:
                  - {t: 2.0, action: fall, yaw: 1.57}
            utterances:
              - {t: 1.0, say: marvin follow me}
            actions:
              - {t: 3.0, kind: Stop}
            estops:
              - {t: 4.0, latch: true}
            assertions:
              - {type: no_event, name: collision}
        """))
        sc = load_scenario(scn)
        assert sc.horizon == 12.5
        assert "dock" in sc.pois           # names lowercase-normalized
        assert sc.persons[0].events[0].yaw == pytest.approx(1.57)
        assert sc.utterances[0].say == "marvin follow me"
        assert sc.assertions[0].type == "no_event"

    def test_missing_magic(self, tmp_path):
        scn = tmp_path / "bad.scn"
        scn.write_text("horizon: 5\n")
        with pytest.raises(ScenarioParseError) as err:
            load_scenario(scn)
        assert err.value.line == 1

    def test_corrupt_yaml(self, tmp_path):
        scn = tmp_path / "bad.scn"
        scn.write_text("MARVINSCN v1\nrobot: [unclosed\n")
        with pytest.raises(ScenarioParseError):
            load_scenario(scn)

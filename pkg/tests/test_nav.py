import heapq
import math

import numpy as np
import pytest

from marvin.config import NavConfig
from marvin.kinematics import ChassisParams, Pose2D
from marvin.messages import PersonGoalMsg
from marvin.nav import (
    LETHAL,
    Costmap,
    FollowController,
    FollowerParams,
    MapFormatError,
    MapperState,
    NoPathError,
    build_costmap,
    follow_path,
    follow_person,
    inflate,
    load_grid,
    mapper_update,
    path_velocity,
    plan,
    save_grid,
    save_map,
)
from marvin.worldsim import OCCUPIED, UNKNOWN, OccupancyGrid
from marvin.worldsim.lidar import LidarScan

CHASSIS = ChassisParams()
NAVCFG = NavConfig()


def scan_of(ranges, yaw=0.0, max_range=8.0):
    ranges = np.asarray(ranges, dtype=float)
    return LidarScan(stamp=0.0, angle_start=yaw,
                     angle_step=2.0 * math.pi / len(ranges),
                     max_range=max_range, ranges=ranges)


def costmap_from_array(cells, resolution=0.1):
    return Costmap(resolution, Pose2D(0, 0, 0),
                   np.asarray(cells, dtype=np.uint8))


# ---------------------------------------------------------------------------
# costmap
# ---------------------------------------------------------------------------

class TestCostmap:
    def test_empty_scan_all_zero(self):
        scan = scan_of(np.full(360, 8.0))
        cm = build_costmap(scan, Pose2D(0, 0, 0), NAVCFG)
        assert not cm.cells.any()

    def test_single_obstacle_decay_matches_distance_oracle(self):
        lethal = np.zeros((41, 41), dtype=bool)
        lethal[20, 30] = True
        res, radius = 0.05, NAVCFG.inflation_radius
        cells = inflate(lethal, res, radius)
        # brute-force distance transform oracle
        lr, lc = 20, 30
        for r in range(41):
            for c in range(41):
                d = math.hypot(r - lr, c - lc) * res
                if (r, c) == (lr, lc):
                    expected = LETHAL
                else:
                    expected = int(np.rint(253 * max(0.0, 1.0 - d / radius)))
                assert cells[r, c] == expected, (r, c)

    def test_costs_decay_monotonically(self):
        lethal = np.zeros((41, 41), dtype=bool)
        lethal[20, 20] = True
        cells = inflate(lethal, 0.05, 0.36)
        row = cells[20, 21:29].astype(int)
        assert all(a >= b for a, b in zip(row, row[1:]))

    def test_obstacle_next_to_robot_keeps_robot_cell_plannable(self):
        ranges = np.full(360, 8.0)
        ranges[0] = 0.02  # returns practically on top of the sensor
        cm = build_costmap(scan_of(ranges), Pose2D(0, 0, 0), NAVCFG)
        idx = cm.cell_index(0.0, 0.0)
        assert cm.cells[idx] < LETHAL

    def test_endpoints_are_lethal(self):
        ranges = np.full(360, 8.0)
        ranges[0] = 2.0
        cm = build_costmap(scan_of(ranges), Pose2D(0, 0, 0), NAVCFG)
        idx = cm.cell_index(2.0, 0.0)
        assert cm.cells[idx] == LETHAL


# ---------------------------------------------------------------------------
# planner vs Dijkstra oracle
# ---------------------------------------------------------------------------

SQRT2 = math.sqrt(2.0)
STEPS = ((-1, 0, 1.0), (1, 0, 1.0), (0, -1, 1.0), (0, 1, 1.0),
         (-1, -1, SQRT2), (-1, 1, SQRT2), (1, -1, SQRT2), (1, 1, SQRT2))


def dijkstra_cost(cm: Costmap, start, goal):
    """Independent oracle: plain Dijkstra over the same edge-cost contract,
    carrying costs as exact (straight, diagonal) integer pairs."""
    dist = {start: (0, 0)}
    pq = [(0.0, 0, 0, start)]
    settled = set()
    while pq:
        _, a, b, cell = heapq.heappop(pq)
        if cell in settled or dist.get(cell) != (a, b):
            continue
        settled.add(cell)
        if cell == goal:
            return (a + b * SQRT2) * cm.resolution / 253.0
        for dr, dc, diag in ((-1, 0, 0), (1, 0, 0), (0, -1, 0), (0, 1, 0),
                             (-1, -1, 1), (-1, 1, 1), (1, -1, 1), (1, 1, 1)):
            nxt = (cell[0] + dr, cell[1] + dc)
            if not (0 <= nxt[0] < cm.height and 0 <= nxt[1] < cm.width):
                continue
            cost = cm.cells[nxt]
            if cost >= LETHAL:
                continue
            if diag and (cm.cells[cell[0] + dr, cell[1]] >= LETHAL
                         or cm.cells[cell[0], cell[1] + dc] >= LETHAL):
                continue
            w = 253 + int(cost)
            na, nb = (a, b + w) if diag else (a + w, b)
            known = dist.get(nxt)
            # distinct integer pairs differ by far more than float noise,
            # so the float comparison is faithful to the exact order
            if known is None or na + nb * SQRT2 < known[0] + known[1] * SQRT2:
                dist[nxt] = (na, nb)
                heapq.heappush(pq, (na + nb * SQRT2, na, nb, nxt))
    return None


class TestPlanner:
    def test_free_corridor_cost(self):
        cm = costmap_from_array(np.zeros((5, 15)))
        start = cm.cell_center(2, 1)
        goal = cm.cell_center(2, 11)
        path = plan(cm, start, goal)
        assert path.total_cost == pytest.approx(10 * 0.1, abs=1e-12)
        assert len(path.cells) == 11

    def test_wall_with_opening_matches_dijkstra_exactly(self):
        cells = np.zeros((20, 20), dtype=np.uint8)
        cells[2:18, 10] = LETHAL   # wall with gaps at the top and bottom rows
        cm = costmap_from_array(cells)
        start, goal = (10, 2), (10, 17)
        path = plan(cm, cm.cell_center(*start), cm.cell_center(*goal))
        oracle = dijkstra_cost(cm, start, goal)
        assert path.total_cost == oracle

    def test_random_grids_exact_equality(self):
        rng = np.random.default_rng(77)
        agreements = 0
        for _ in range(30):
            cells = np.where(rng.random((32, 32)) < 0.2, LETHAL, 0).astype(np.uint8)
            cells[1, 1] = 0
            cells[30, 30] = 0
            # sprinkle inflation-like costs on some free cells
            soft = rng.integers(0, 120, size=(32, 32)).astype(np.uint8)
            cells = np.where(cells == 0, np.where(rng.random((32, 32)) < 0.3, soft, 0),
                             cells).astype(np.uint8)
            cm = costmap_from_array(cells)
            oracle = dijkstra_cost(cm, (1, 1), (30, 30))
            try:
                path = plan(cm, cm.cell_center(1, 1), cm.cell_center(30, 30))
            except NoPathError:
                assert oracle is None
                continue
            assert path.total_cost == oracle
            agreements += 1
        assert agreements >= 15  # most random grids are connected

    def test_path_never_touches_lethal(self):
        rng = np.random.default_rng(5)
        cells = np.where(rng.random((32, 32)) < 0.25, LETHAL, 0).astype(np.uint8)
        cells[1, 1] = cells[30, 30] = 0
        cm = costmap_from_array(cells)
        try:
            path = plan(cm, cm.cell_center(1, 1), cm.cell_center(30, 30))
        except NoPathError:
            return
        assert all(cm.cells[cell] < LETHAL for cell in path.cells)

    def test_goal_inside_wall_rejected(self):
        cells = np.zeros((10, 10), dtype=np.uint8)
        cells[5, 5] = LETHAL
        cm = costmap_from_array(cells)
        with pytest.raises(ValueError):
            plan(cm, cm.cell_center(1, 1), cm.cell_center(5, 5))

    def test_unreachable_goal_raises_nopath(self):
        cells = np.zeros((10, 10), dtype=np.uint8)
        cells[:, 5] = LETHAL
        cm = costmap_from_array(cells)
        with pytest.raises(NoPathError):
            plan(cm, cm.cell_center(1, 1), cm.cell_center(1, 8))


# ---------------------------------------------------------------------------
# followers
# ---------------------------------------------------------------------------

def straight_path(n=60, res=0.1, y=0.0):
    return [(i * res, y) for i in range(n)]


class TestFollowPath:
    PARAMS = FollowerParams(CHASSIS, v_max=1.5)

    def test_forward_on_path(self):
        vx, vy, reached = path_velocity(straight_path(), Pose2D(0, 0, 0), self.PARAMS)
        assert not reached
        assert vx == pytest.approx(1.5, abs=1e-9)
        assert vy == pytest.approx(0.0, abs=1e-9)

    def test_gaze_does_not_change_translation(self):
        # holonomic decoupling: translation identical for any gaze target
        params = FollowerParams(ChassisParams(wheel_speed_max=1e6), v_max=1.5)
        pose = Pose2D(0.3, 0.05, 0.2)
        t_ahead, _ = follow_path(straight_path(), pose, params, gaze_xy=(5.0, 0.0))
        t_left, _ = follow_path(straight_path(), pose, params, gaze_xy=(0.3, 9.0))
        assert t_ahead.vx == t_left.vx
        assert t_ahead.vy == t_left.vy
        assert t_left.yaw_rate != t_ahead.yaw_rate

    def test_output_respects_octahedron(self):
        rng = np.random.default_rng(3)
        from marvin.kinematics import inverse_kinematics
        for _ in range(100):
            pose = Pose2D(*rng.uniform(0, 3, size=2), rng.uniform(-3, 3))
            twist, _ = follow_path(straight_path(), pose, self.PARAMS,
                                   gaze_xy=tuple(rng.uniform(-5, 5, size=2)))
            wheels = inverse_kinematics(CHASSIS, twist)
            assert wheels.max_abs <= CHASSIS.wheel_speed_max * (1 + 1e-9)

    def test_goal_reached_zero_twist(self):
        path = straight_path(n=20)
        pose = Pose2D(1.85, 0.02, 0.0)  # within 0.15 m of (1.9, 0)
        twist, reached = follow_path(path, pose, self.PARAMS)
        assert reached and twist == __import__("marvin.kinematics", fromlist=["Twist2D"]).Twist2D(0, 0, 0)

    def test_empty_path_rejected(self):
        with pytest.raises(ValueError):
            path_velocity([], Pose2D(0, 0, 0), self.PARAMS)


class TestFollowPerson:
    PARAMS = FollowerParams(CHASSIS, v_max=1.5, standoff=1.2)

    def test_person_ahead_moves_forward(self):
        goal = PersonGoalMsg(4.0, 0.0, stamp=0.0)
        twist = follow_person(goal, Pose2D(0, 0, 0), self.PARAMS)
        assert twist.vx > 0.5
        assert abs(twist.vy) < 1e-9
        assert abs(twist.yaw_rate) < 1e-9

    def test_inside_standoff_only_heading(self):
        goal = PersonGoalMsg(0.8, 0.5, stamp=0.0)  # 0.94 m away, to the left
        twist = follow_person(goal, Pose2D(0, 0, 0), self.PARAMS)
        assert twist.vx == 0.0 and twist.vy == 0.0
        assert twist.yaw_rate > 0.0

    def test_heading_tracks_person_during_motion(self):
        goal = PersonGoalMsg(3.0, 2.0, stamp=0.0)
        twist = follow_person(goal, Pose2D(0, 0, 0), self.PARAMS)
        bearing = math.atan2(2.0, 3.0)
        assert twist.yaw_rate == pytest.approx(
            min(self.PARAMS.yaw_gain * bearing,
                CHASSIS.wheel_radius * CHASSIS.wheel_speed_max / CHASSIS.lever))

    def test_search_timeout_after_five_seconds(self):
        ctl = FollowController(self.PARAMS, stale_after=1.0, search_timeout=5.0)
        out = ctl.update(PersonGoalMsg(3.0, 0.0, stamp=0.0), Pose2D(0, 0, 0), 0.0)
        assert not out.searching
        timeouts = []
        t = 0.0
        while t < 8.0:
            t += 0.02
            out = ctl.update(None, Pose2D(0, 0, 0), t)
            if out.timed_out:
                timeouts.append(t)
            if out.searching:
                assert out.twist.speed == 0.0
        assert len(timeouts) == 1
        assert timeouts[0] == pytest.approx(5.0, abs=0.03)


# ---------------------------------------------------------------------------
# mapper
# ---------------------------------------------------------------------------

class TestMapper:
    def make_state(self):
        return MapperState(width=100, height=100, resolution=0.1,
                           origin=Pose2D(-5.0, -5.0, 0.0))

    def test_prior_is_half(self):
        state = self.make_state()
        assert np.all(state.log_odds == 0.0)
        assert np.all(state.probabilities() == 0.5)

    def test_twenty_hits_clamp(self):
        state = self.make_state()
        scan = scan_of([2.0], max_range=8.0)
        for _ in range(20):
            mapper_update(state, Pose2D(0, 0, 0), scan)
        idx = (int((0.0 + 5.0) / 0.1), int((2.0 + 5.0) / 0.1))
        assert state.log_odds[idx] == 4.0  # 20 * 0.85 clamped at +4

    def test_alternating_hit_free_drifts(self):
        state = self.make_state()
        hit_scan = scan_of([2.05], max_range=8.0)
        pass_scan = scan_of([4.0], max_range=8.0)
        idx = (int(5.0 / 0.1), int((2.05 + 5.0) / 0.1))
        for _ in range(5):
            mapper_update(state, Pose2D(0, 0, 0), hit_scan)
            mapper_update(state, Pose2D(0, 0, 0), pass_scan)
        assert state.log_odds[idx] == pytest.approx(5 * (0.85 - 0.4))

    def test_free_applied_once_per_beam(self):
        state = self.make_state()
        mapper_update(state, Pose2D(0, 0, 0), scan_of([3.0], max_range=8.0))
        crossed = state.log_odds[state.log_odds < 0.0]
        assert np.allclose(crossed, -0.4)

    def test_batch_order_independent(self):
        scans = [scan_of([2.0], yaw=0.3), scan_of([3.5], yaw=1.1),
                 scan_of([1.2], yaw=-0.7)]
        a, b = self.make_state(), self.make_state()
        for s in scans:
            mapper_update(a, Pose2D(0, 0, 0), s)
        for s in reversed(scans):
            mapper_update(b, Pose2D(0, 0, 0), s)
        assert np.allclose(a.log_odds, b.log_odds, atol=1e-12)


class TestMapIO:
    def test_round_trip_bit_identical(self, tmp_path):
        state = MapperState(40, 30, 0.1, Pose2D(-2, -1, 0))
        scan = scan_of(np.full(90, 1.5), max_range=8.0)
        mapper_update(state, Pose2D(0, 0, 0), scan)
        p1, p2 = tmp_path / "a.map", tmp_path / "b.map"
        grid = save_map(state, p1)
        loaded = load_grid(p1)
        assert np.array_equal(grid.cells, loaded.cells)
        save_grid(loaded, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_threshold_boundaries(self):
        state = MapperState(3, 1, 0.1)
        state.log_odds[0, 0] = 0.0          # p = 0.5 -> unknown
        state.log_odds[0, 1] = 5.0          # clamps later; p > 0.65 -> occupied
        state.log_odds[0, 2] = -5.0         # p < 0.35 -> free
        grid = state.to_occupancy()
        assert grid.cells[0, 0] == UNKNOWN
        assert grid.cells[0, 1] == OCCUPIED
        assert grid.cells[0, 2] == 0

    def test_truncated_file(self, tmp_path):
        state = MapperState(10, 10, 0.1)
        path = tmp_path / "m.map"
        save_map(state, path)
        blob = path.read_bytes()
        path.write_bytes(blob[:len(blob) - 7])
        with pytest.raises(MapFormatError):
            load_grid(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "m.map"
        path.write_bytes(b"NOTAMAP v9\n" + b"x" * 50)
        with pytest.raises(MapFormatError) as err:
            load_grid(path)
        assert err.value.line in (1, 2)

"""Optimal grid path planning on a costmap.

Path costs are carried exactly: every edge is (resolution/253) * step *
(253 + cell_cost) with step either 1 or sqrt(2), so any path cost equals
(A + B*sqrt(2)) * resolution / 253 for integers A (straight part) and B
(diagonal part). Since sqrt(2) is irrational the pair is unique, and cost
comparisons are done in exact integer arithmetic; the planner is optimal
to the bit, not just to rounding.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .costmap import LETHAL, Costmap

__all__ = ["PlannedPath", "NoPathError", "plan", "exact_cost_value"]

_SQRT2 = math.sqrt(2.0)
# 8-connected neighborhood: (dr, dc, diagonal?)
_NEIGHBORS = (
    (-1, 0, False), (1, 0, False), (0, -1, False), (0, 1, False),
    (-1, -1, True), (-1, 1, True), (1, -1, True), (1, 1, True),
)


class NoPathError(RuntimeError):
    """Goal is unreachable on this costmap."""


@dataclass(frozen=True)
class PlannedPath:
    points: tuple[tuple[float, float], ...]   # world xy, start cell first
    total_cost: float
    cells: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.points)

    @property
    def goal(self) -> tuple[float, float]:
        return self.points[-1]


def exact_cost_value(straight: int, diagonal: int, resolution: float) -> float:
    """Float value of the exact cost pair (straight, diagonal)."""
    return (straight + diagonal * _SQRT2) * resolution / 253.0


def _less(a1: int, b1: int, a2: int, b2: int) -> bool:
    """Exact comparison: a1 + b1*sqrt(2) < a2 + b2*sqrt(2)."""
    da = a1 - a2
    db = b1 - b2
    if da >= 0 and db >= 0:
        return False
    if da <= 0 and db <= 0:
        return da < 0 or db < 0
    if da < 0:  # da < 0 < db: less iff da^2 > 2*db^2
        return da * da > 2 * db * db
    return da * da < 2 * db * db  # db < 0 < da


def _octile(a: tuple[int, int], b: tuple[int, int]) -> float:
    dr = abs(a[0] - b[0])
    dc = abs(a[1] - b[1])
    # admissible in the exact metric: every cell adds at least 253 units
    return 253.0 * (max(dr, dc) + (_SQRT2 - 1.0) * min(dr, dc))


def plan(costmap: Costmap, start_xy: tuple[float, float],
         goal_xy: tuple[float, float]) -> PlannedPath:
    """A* over the 8-connected grid with octile heuristic.

    Diagonal moves never cut past a lethal cell. Ties break toward the
    lower cell index. Raises ValueError when the start or goal cell is
    lethal or outside the window, NoPathError when unreachable.
    """
    start = costmap.cell_index(*start_xy)
    goal = costmap.cell_index(*goal_xy)
    if start is None or goal is None:
        raise ValueError("start/goal outside the costmap window")
    if costmap.is_lethal(*start):
        raise ValueError("start cell is lethal")
    if costmap.is_lethal(*goal):
        raise ValueError("goal cell is lethal")

    width = costmap.width
    cells = costmap.cells

    g: dict[tuple[int, int], tuple[int, int]] = {start: (0, 0)}
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    open_heap: list[tuple[float, int, int, int, tuple[int, int]]] = []
    heapq.heappush(open_heap, (_octile(start, goal),
                               start[0] * width + start[1], 0, 0, start))
    found = False
    while open_heap:
        _, _, pa, pb, current = heapq.heappop(open_heap)
        if g.get(current) != (pa, pb):
            continue  # stale heap entry
        if current == goal:
            found = True
            break
        for dr, dc, diagonal in _NEIGHBORS:
            nxt = (current[0] + dr, current[1] + dc)
            if not (0 <= nxt[0] < costmap.height and 0 <= nxt[1] < width):
                continue
            cost = cells[nxt]
            if cost >= LETHAL:
                continue
            if diagonal:
                # no cutting corners past a lethal cell
                if (cells[current[0] + dr, current[1]] >= LETHAL
                        or cells[current[0], current[1] + dc] >= LETHAL):
                    continue
            weight = 253 + int(cost)
            na, nb = (pa, pb + weight) if diagonal else (pa + weight, pb)
            known = g.get(nxt)
            if known is None or _less(na, nb, *known):
                g[nxt] = (na, nb)
                parent[nxt] = current
                f = na + nb * _SQRT2 + _octile(nxt, goal)
                heapq.heappush(open_heap,
                               (f, nxt[0] * width + nxt[1], na, nb, nxt))
    if not found:
        raise NoPathError(f"no path from {start} to {goal}")

    chain = [goal]
    while chain[-1] != start:
        chain.append(parent[chain[-1]])
    chain.reverse()
    points = tuple(costmap.cell_center(r, c) for r, c in chain)
    ga, gb = g[goal]
    return PlannedPath(points=points,
                       total_cost=exact_cost_value(ga, gb, costmap.resolution),
                       cells=tuple(chain))

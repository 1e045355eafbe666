"""Grid search algorithms with uniform metrics and path extraction.

All planners report the same result shape: status, path, geometric path cost,
expanded-cell count (nodes popped and processed), inspected-cell count
(distinct cells whose occupancy was examined, ray intermediates included),
and wall time around the search loop only.

The inner loops work on flat cell indexes (y * width + x) over the map's byte
buffer and use heapq directly with the frontier discipline that the OpenList
type documents: minimum f first, FIFO on ties via an insertion serial, lazy
deletion of superseded entries. The inspected-cell metric is a pure function
of the expansion trace on an immutable map, so it is reconstructed after the
timed loop instead of being tallied inside it.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from heapq import heappop, heappush

from .grid import CellState, Coord, GridMap, euclidean, ray_cells
from .ingest import Scenario
from .motion import SQRT2, AdaptiveCostParams, _OFFSET_TEMPLATE, expand_node

_INF = math.inf

# Fixed neighbor order for the 8-connected baselines: N, NE, E, SE, S, SW, W, NW
# (y grows downward). DFS explores in exactly this order; the others use it for
# deterministic tie behavior.
NEIGHBOR_ORDER = ((0, -1), (1, -1), (1, 0), (1, 1),
                  (0, 1), (-1, 1), (-1, 0), (-1, -1))


class SearchStatus(Enum):
    FOUND = "found"
    NOT_FOUND = "not_found"


@dataclass
class SearchResult:
    status: SearchStatus
    path: list[Coord]
    path_cost: float
    expanded_cells: int
    inspected_cells: int
    wall_time: float
    algorithm_id: str
    rmb_n: int = 0
    # expansion order, kept for rendering; not part of the flattened record
    expanded_nodes: list[Coord] = field(default_factory=list, repr=False)

    @property
    def found(self) -> bool:
        return self.status is SearchStatus.FOUND


class OpenList:
    """Min-priority frontier keyed on f, FIFO on ties via an insertion serial.

    Superseded entries are not removed; callers skip them on pop (lazy
    deletion) by comparing the popped g against their cost table. The planner
    loops inline this discipline on raw heaps for speed.
    """

    __slots__ = ("_heap", "_serial")

    def __init__(self):
        self._heap: list[tuple[float, int, float, Coord]] = []
        self._serial = 0

    def push(self, coord: Coord, g: float, f: float) -> None:
        heappush(self._heap, (f, self._serial, g, coord))
        self._serial += 1

    def pop(self) -> tuple[Coord, float, float]:
        f, _, g, coord = heappop(self._heap)
        return coord, g, f

    def __len__(self) -> int:
        return len(self._heap)


def path_geometric_cost(path: list[Coord]) -> float:
    """Sum of Euclidean segment lengths; segments must be axis or 45-degree rays."""
    total = 0.0
    for a, b in zip(path, path[1:]):
        dx = b[0] - a[0]
        dy = b[1] - a[1]
        if (dx == 0 and dy == 0) or not (dx == 0 or dy == 0 or abs(dx) == abs(dy)):
            raise ValueError(f"segment {a} -> {b} is not an axis or diagonal ray")
        total += math.hypot(dx, dy)
    return total


def check_path(grid: GridMap, scenario: Scenario, path: list[Coord]) -> None:
    """Raise ValueError unless path runs start -> goal over free ray segments."""
    if not path:
        raise ValueError("empty path")
    if path[0] != scenario.start or path[-1] != scenario.goal:
        raise ValueError(f"path endpoints {path[0]} -> {path[-1]} do not match scenario")
    if not grid.is_free(scenario.start):
        raise ValueError(f"start {scenario.start} is not free")
    for a, b in zip(path, path[1:]):
        dx = b[0] - a[0]
        dy = b[1] - a[1]
        steps = max(abs(dx), abs(dy))
        if steps == 0 or not (dx == 0 or dy == 0 or abs(dx) == abs(dy)):
            raise ValueError(f"segment {a} -> {b} is not an axis or diagonal ray")
        unit = ((dx > 0) - (dx < 0), (dy > 0) - (dy < 0))
        for cell in ray_cells(a, unit, steps):
            if not grid.is_free(cell):
                raise ValueError(f"segment {a} -> {b} crosses non-free cell {cell}")


def _require_free(grid: GridMap, c: Coord, label: str) -> None:
    state = grid.cell_state(c)
    if state is not CellState.FREE:
        raise ValueError(f"{label} {c} is {state.value}, expected a free cell")


def _idx_path(parents: dict[int, int], start_idx: int, goal_idx: int,
              width: int) -> list[Coord]:
    idxs = [goal_idx]
    c = goal_idx
    while c != start_idx:
        c = parents[c]
        idxs.append(c)
    idxs.reverse()
    return [(i % width, i // width) for i in idxs]


def _trivial_result(start: Coord, algorithm_id: str, rmb_n: int,
                    wall_time: float) -> SearchResult:
    return SearchResult(status=SearchStatus.FOUND, path=[start], path_cost=0.0,
                        expanded_cells=1, inspected_cells=1, wall_time=wall_time,
                        algorithm_id=algorithm_id, rmb_n=rmb_n,
                        expanded_nodes=[start])


def _neighbor_inspected(grid: GridMap, expanded: list[int], skip_last: bool,
                        start_idx: int, goal_idx: int) -> int:
    """Distinct cells probed by 8-neighborhood planners: every in-bounds
    neighbor of each expanded node (the final goal pop expands nothing),
    plus start and goal."""
    width, height = grid.width, grid.height
    mark = bytearray(width * height)
    mark[start_idx] = 1
    mark[goal_idx] = 1
    body = expanded[:-1] if skip_last and expanded else expanded
    for idx in body:
        y, x = divmod(idx, width)
        x_lo, x_hi = x > 0, x < width - 1
        if y > 0:
            top = idx - width
            mark[top] = 1
            if x_lo:
                mark[top - 1] = 1
            if x_hi:
                mark[top + 1] = 1
        if y < height - 1:
            bot = idx + width
            mark[bot] = 1
            if x_lo:
                mark[bot - 1] = 1
            if x_hi:
                mark[bot + 1] = 1
        if x_lo:
            mark[idx - 1] = 1
        if x_hi:
            mark[idx + 1] = 1
    return mark.count(1)


def _rmb_inspected(grid: GridMap, expanded: list[int], skip_last: bool,
                   start_idx: int, goal_idx: int, n: int, goal: Coord) -> int:
    """Distinct cells probed by the motion-block planner: the ray prefixes
    examined at each expanded node, plus start and goal."""
    width = grid.width
    probes: set[int] = {start_idx, goal_idx}
    body = expanded[:-1] if skip_last and expanded else expanded
    for idx in body:
        node = (idx % width, idx // width)
        expand_node(grid, node, 0.0, goal, n, 0.0, inspected=probes)
    return len(probes)


def rmb_astar(grid: GridMap, scenario: Scenario, n: int,
              params: AdaptiveCostParams | None = None,
              emit_truncated_steps: bool = False,
              direction_weighted: bool = False) -> SearchResult:
    """A* over the distance-n motion block with the adaptive movement cost.

    Each candidate jump is scored by its adaptive arrival cost (accumulated
    jump length plus the alpha-weighted goal distance of the end cell) and
    ordered by that score plus the Euclidean distance to the goal. The stored
    node cost accumulates jump lengths only: the goal-tracking term is
    re-evaluated at each frontier cell, not compounded along the path, so it
    steers expansion without growing with path length. Nodes are finalized
    when popped; stale open entries are skipped. The reported path cost is
    the geometric length of the reconstructed path, comparable across all
    planners.

    The ray rules match motion.expand_node(): only a fully free ray emits its
    end cell, and a goal closer than n on a free ray prefix is emitted
    directly.
    """
    if params is None:
        params = AdaptiveCostParams()
    if n < 1:
        raise ValueError(f"motion block size must be >= 1, got {n}")
    start, goal = scenario.start, scenario.goal
    _require_free(grid, start, "start")
    _require_free(grid, goal, "goal")
    algorithm_id = "rmb-astar"
    t0 = time.perf_counter()
    if start == goal:
        return _trivial_result(start, algorithm_id, n, time.perf_counter() - t0)

    width, height = grid.width, grid.height
    flat = grid._flat
    alpha = params.alpha
    dirs = tuple((ux, uy, uy * width + ux, ux != 0 and uy != 0)
                 for ux, uy in _OFFSET_TEMPLATE)
    gx, gy = goal
    start_idx = start[1] * width + start[0]
    goal_idx = gy * width + gx
    g = {start_idx: 0.0}
    g_get = g.get
    parents: dict[int, int] = {}
    closed: set[int] = set()
    expanded: list[int] = []
    heap = [(euclidean(start, goal), 0, 0.0, start_idx)]
    serial = 1
    found = False

    lean_ok = not emit_truncated_steps
    n_sq2 = n * SQRT2
    edge_x = width - n
    edge_y = height - n

    while heap:
        _, _, pg, idx = heappop(heap)
        if idx in closed or pg > g[idx]:
            continue
        closed.add(idx)
        expanded.append(idx)
        if idx == goal_idx:
            found = True
            break
        y, x = divmod(idx, width)
        dgx = gx - x
        dgy = gy - y
        if (lean_ok and n <= x < edge_x and n <= y < edge_y
                and (dgx > n or dgx < -n or dgy > n or dgy < -n)):
            # common case: interior node, goal out of block range
            for ux, uy, stride, diag in dirs:
                first = idx + stride
                stop = idx + stride * (n + 1)
                if 1 in (flat[first:stop:stride] if stop >= 0
                         else flat[first::stride]):
                    continue
                nidx = idx + stride * n
                if nidx in closed:
                    continue
                nb = pg + n_sq2 if diag else pg + n
                if nb < g_get(nidx, _INF):
                    g[nidx] = nb
                    parents[nidx] = idx
                    h = math.hypot(dgx - ux * n, dgy - uy * n)
                    arrival = nb + alpha * h
                    if direction_weighted and diag:
                        arrival *= SQRT2
                    heappush(heap, (arrival + h, serial, nb, nidx))
                    serial += 1
            continue
        goal_near = -n <= dgx <= n and -n <= dgy <= n
        border_near = x < n or y < n or x >= edge_x or y >= edge_y
        for ux, uy, stride, diag in dirs:
            if border_near:
                m = n
                if ux > 0:
                    m = min(m, width - 1 - x)
                elif ux < 0:
                    m = min(m, x)
                if uy > 0:
                    m = min(m, height - 1 - y)
                elif uy < 0:
                    m = min(m, y)
                if m == 0:
                    continue
            else:
                m = n
            first = idx + stride
            stop = idx + (m + 1) * stride
            chunk = flat[first:stop:stride] if stop >= 0 else flat[first::stride]
            pos = chunk.find(1)
            free_len = m if pos < 0 else pos
            if goal_near:
                if ux == 0:
                    k = dgy * uy
                    on_ray = dgx == 0 and k > 0
                elif uy == 0:
                    k = dgx * ux
                    on_ray = dgy == 0 and k > 0
                else:
                    k = dgx * ux
                    on_ray = k > 0 and dgy * uy == k
                if on_ray and k <= free_len:
                    steps = k
                elif pos < 0 and m == n:
                    steps = n
                elif emit_truncated_steps and free_len >= 1:
                    steps = free_len
                else:
                    continue
            elif pos < 0 and m == n:
                steps = n
            elif emit_truncated_steps and free_len >= 1:
                steps = free_len
            else:
                continue
            nidx = idx + steps * stride
            if nidx in closed:
                continue
            nb = pg + (steps * SQRT2 if diag else steps)
            if nb < g_get(nidx, _INF):
                g[nidx] = nb
                parents[nidx] = idx
                h = math.hypot(dgx - ux * steps, dgy - uy * steps)
                arrival = nb + alpha * h
                if direction_weighted and diag:
                    arrival *= SQRT2
                heappush(heap, (arrival + h, serial, nb, nidx))
                serial += 1

    wall = time.perf_counter() - t0
    path = _idx_path(parents, start_idx, goal_idx, width) if found else []
    return SearchResult(
        status=SearchStatus.FOUND if found else SearchStatus.NOT_FOUND,
        path=path, path_cost=path_geometric_cost(path),
        expanded_cells=len(expanded),
        inspected_cells=_rmb_inspected(grid, expanded, found, start_idx,
                                       goal_idx, n, goal),
        wall_time=wall, algorithm_id=algorithm_id, rmb_n=n,
        expanded_nodes=[(i % width, i // width) for i in expanded])


def _unit_best_first(grid: GridMap, scenario: Scenario, algorithm_id: str,
                     use_heuristic: bool) -> SearchResult:
    """Shared core of conventional A* (Euclidean h) and Dijkstra (h = 0)."""
    start, goal = scenario.start, scenario.goal
    _require_free(grid, start, "start")
    _require_free(grid, goal, "goal")
    t0 = time.perf_counter()
    if start == goal:
        return _trivial_result(start, algorithm_id, 0, time.perf_counter() - t0)

    width, height = grid.width, grid.height
    flat = grid._flat
    dirs = tuple((dx, dy, dy * width + dx, SQRT2 if dx and dy else 1.0)
                 for dx, dy in NEIGHBOR_ORDER)
    gx, gy = goal
    start_idx = start[1] * width + start[0]
    goal_idx = gy * width + gx
    g = {start_idx: 0.0}
    g_get = g.get
    parents: dict[int, int] = {}
    closed: set[int] = set()
    expanded: list[int] = []
    h0 = euclidean(start, goal) if use_heuristic else 0.0
    heap = [(h0, 0, 0.0, start_idx)]
    serial = 1
    found = False

    while heap:
        _, _, pg, idx = heappop(heap)
        if idx in closed or pg > g[idx]:
            continue
        closed.add(idx)
        expanded.append(idx)
        if idx == goal_idx:
            found = True
            break
        y, x = divmod(idx, width)
        for dx, dy, stride, step in dirs:
            nx = x + dx
            ny = y + dy
            if not (0 <= nx < width and 0 <= ny < height):
                continue
            nidx = idx + stride
            if flat[nidx] or nidx in closed:
                continue
            ng = pg + step
            if ng < g_get(nidx, _INF):
                g[nidx] = ng
                parents[nidx] = idx
                f = ng + math.hypot(gx - nx, gy - ny) if use_heuristic else ng
                heappush(heap, (f, serial, ng, nidx))
                serial += 1

    wall = time.perf_counter() - t0
    path = _idx_path(parents, start_idx, goal_idx, width) if found else []
    return SearchResult(
        status=SearchStatus.FOUND if found else SearchStatus.NOT_FOUND,
        path=path, path_cost=path_geometric_cost(path),
        expanded_cells=len(expanded),
        inspected_cells=_neighbor_inspected(grid, expanded, found, start_idx,
                                            goal_idx),
        wall_time=wall, algorithm_id=algorithm_id,
        expanded_nodes=[(i % width, i // width) for i in expanded])


def astar_conventional(grid: GridMap, scenario: Scenario) -> SearchResult:
    """8-neighbor A* with unit/sqrt(2) step costs and the Euclidean heuristic.

    The heuristic is admissible and consistent on this move set, so the
    returned path cost is optimal.
    """
    return _unit_best_first(grid, scenario, "astar", use_heuristic=True)


def _dijkstra(grid: GridMap, scenario: Scenario) -> SearchResult:
    return _unit_best_first(grid, scenario, "dijkstra", use_heuristic=False)


def _bfs(grid: GridMap, scenario: Scenario) -> SearchResult:
    """Breadth-first by hop count; path cost still reported geometrically."""
    start, goal = scenario.start, scenario.goal
    _require_free(grid, start, "start")
    _require_free(grid, goal, "goal")
    t0 = time.perf_counter()
    if start == goal:
        return _trivial_result(start, "bfs", 0, time.perf_counter() - t0)

    width, height = grid.width, grid.height
    flat = grid._flat
    dirs = tuple((dx, dy, dy * width + dx) for dx, dy in NEIGHBOR_ORDER)
    start_idx = start[1] * width + start[0]
    goal_idx = goal[1] * width + goal[0]
    visited = {start_idx}
    parents: dict[int, int] = {}
    expanded: list[int] = []
    queue = deque([start_idx])
    found = False

    while queue:
        idx = queue.popleft()
        expanded.append(idx)
        if idx == goal_idx:
            found = True
            break
        y, x = divmod(idx, width)
        for dx, dy, stride in dirs:
            nx = x + dx
            ny = y + dy
            if not (0 <= nx < width and 0 <= ny < height):
                continue
            nidx = idx + stride
            if flat[nidx] or nidx in visited:
                continue
            visited.add(nidx)
            parents[nidx] = idx
            queue.append(nidx)

    wall = time.perf_counter() - t0
    path = _idx_path(parents, start_idx, goal_idx, width) if found else []
    return SearchResult(
        status=SearchStatus.FOUND if found else SearchStatus.NOT_FOUND,
        path=path, path_cost=path_geometric_cost(path),
        expanded_cells=len(expanded),
        inspected_cells=_neighbor_inspected(grid, expanded, found, start_idx,
                                            goal_idx),
        wall_time=wall, algorithm_id="bfs",
        expanded_nodes=[(i % width, i // width) for i in expanded])


def _dfs(grid: GridMap, scenario: Scenario) -> SearchResult:
    """Depth-first with delayed visit marking; returns the first path found.

    Neighbors are explored in the fixed order N, NE, E, SE, S, SW, W, NW, so
    runs are deterministic, but the path is whatever the traversal hits first.
    """
    start, goal = scenario.start, scenario.goal
    _require_free(grid, start, "start")
    _require_free(grid, goal, "goal")
    t0 = time.perf_counter()
    if start == goal:
        return _trivial_result(start, "dfs", 0, time.perf_counter() - t0)

    width, height = grid.width, grid.height
    flat = grid._flat
    # pushed in reverse so N is explored first
    dirs = tuple((dx, dy, dy * width + dx) for dx, dy in reversed(NEIGHBOR_ORDER))
    start_idx = start[1] * width + start[0]
    goal_idx = goal[1] * width + goal[0]
    visited: set[int] = set()
    parents: dict[int, int] = {}
    expanded: list[int] = []
    stack: list[tuple[int, int]] = [(start_idx, -1)]
    found = False

    while stack:
        idx, parent = stack.pop()
        if idx in visited:
            continue
        visited.add(idx)
        if parent >= 0:
            parents[idx] = parent
        expanded.append(idx)
        if idx == goal_idx:
            found = True
            break
        y, x = divmod(idx, width)
        for dx, dy, stride in dirs:
            nx = x + dx
            ny = y + dy
            if not (0 <= nx < width and 0 <= ny < height):
                continue
            nidx = idx + stride
            if flat[nidx] or nidx in visited:
                continue
            stack.append((nidx, idx))

    wall = time.perf_counter() - t0
    path = _idx_path(parents, start_idx, goal_idx, width) if found else []
    return SearchResult(
        status=SearchStatus.FOUND if found else SearchStatus.NOT_FOUND,
        path=path, path_cost=path_geometric_cost(path),
        expanded_cells=len(expanded),
        inspected_cells=_neighbor_inspected(grid, expanded, found, start_idx,
                                            goal_idx),
        wall_time=wall, algorithm_id="dfs",
        expanded_nodes=[(i % width, i // width) for i in expanded])


_BASELINES = {"dijkstra": _dijkstra, "bfs": _bfs, "dfs": _dfs}


def baseline_search(algorithm: str, grid: GridMap, scenario: Scenario) -> SearchResult:
    """Run one of the uninformed baselines: 'dijkstra', 'bfs' or 'dfs'."""
    try:
        fn = _BASELINES[algorithm]
    except KeyError:
        raise ValueError(f"unknown baseline {algorithm!r}; "
                         f"expected one of {sorted(_BASELINES)}") from None
    return fn(grid, scenario)


ALGORITHM_IDS = ("rmb-astar", "astar", "dijkstra", "bfs", "dfs")


def run_planner(algorithm_id: str, grid: GridMap, scenario: Scenario,
                n: int = 0, params: AdaptiveCostParams | None = None) -> SearchResult:
    """Dispatch by algorithm id; n and params apply to 'rmb-astar' only."""
    if algorithm_id == "rmb-astar":
        return rmb_astar(grid, scenario, n or 1, params)
    if algorithm_id == "astar":
        return astar_conventional(grid, scenario)
    return baseline_search(algorithm_id, grid, scenario)

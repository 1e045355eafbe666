"""Distance-n motion block and the goal-tracking adaptive movement cost.

The motion block is the successor template of the planner: eight rays (four
cardinal, four diagonal) of length n around the current cell. Every cell on a
ray is checked, but only the ray's end cell becomes a successor, which is what
cuts the open-list growth for n > 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .grid import Coord, GridMap, euclidean

SQRT2 = math.sqrt(2.0)

ALPHA_DEFAULT = 0.007
ALPHA_MIN = 0.001
ALPHA_MAX = 0.009


class DirectionClass(Enum):
    CARDINAL = "cardinal"
    DIAGONAL = "diagonal"


@dataclass(frozen=True)
class MotionVector:
    """One of the eight block directions: full offset plus its base step cost."""
    offset: Coord
    direction_class: DirectionClass
    base_cost: float  # 1 for cardinal, sqrt(2) for diagonal


@dataclass(frozen=True)
class MotionBlock:
    n: int
    entries: tuple[MotionVector, ...]


@dataclass(frozen=True)
class AdaptiveCostParams:
    """Weight of the goal-distance term in the movement cost.

    alpha is restricted to [0.001, 0.009] (0.007 works best in practice);
    alpha = 0 is additionally allowed so the goal bias can be switched off
    in tests and ablations.
    """
    alpha: float = ALPHA_DEFAULT

    def __post_init__(self):
        a = self.alpha
        if a != 0.0 and not (ALPHA_MIN <= a <= ALPHA_MAX):
            raise ValueError(
                f"alpha must be 0 or within [{ALPHA_MIN}, {ALPHA_MAX}], got {a}")


@dataclass(frozen=True)
class Successor:
    cell: Coord
    arrival_cost: float
    via: MotionVector


# Offsets in fixed template order: cardinals first, then diagonals.
_OFFSET_TEMPLATE = ((1, 0), (0, 1), (-1, 0), (0, -1),
                    (-1, -1), (-1, 1), (1, -1), (1, 1))


def build_motion_block(n: int) -> MotionBlock:
    """Eight-direction block of size n: offsets (+-n, 0), (0, +-n), (+-n, +-n)."""
    if n < 1:
        raise ValueError(f"motion block size must be >= 1, got {n}")
    entries = []
    for ux, uy in _OFFSET_TEMPLATE:
        diagonal = ux != 0 and uy != 0
        entries.append(MotionVector(
            offset=(ux * n, uy * n),
            direction_class=DirectionClass.DIAGONAL if diagonal else DirectionClass.CARDINAL,
            base_cost=SQRT2 if diagonal else 1.0,
        ))
    return MotionBlock(n=n, entries=tuple(entries))


def adaptive_cost(ccn: float, cn: Coord, q: Coord, gn: Coord, alpha: float) -> float:
    """Movement cost of stepping from cn to q while tracking the goal gn.

    Accumulated cost of the current node, plus the step length, plus the
    straight-line distance from q to the goal scaled by alpha. The alpha term
    biases expansion toward cells that approach the goal, which is what
    shrinks the searched area.
    """
    return ccn + euclidean(cn, q) + alpha * euclidean(gn, q)


def move_cost(direction_class: DirectionClass, c: float) -> float:
    """Direction-weighted cost: 1 * c for cardinal moves, sqrt(2) * c for diagonal."""
    if direction_class is DirectionClass.CARDINAL:
        return c
    return SQRT2 * c


def expand_node(grid: GridMap, node: Coord, node_cost: float, goal: Coord,
                n: int, alpha: float,
                inspected: set[int] | None = None,
                emit_truncated_steps: bool = False,
                direction_weighted: bool = False
                ) -> list[tuple[int, int, float, float, int]]:
    """Fast successor core shared by successors() and the planner inner loop.

    Walks the eight rays of a size-n block and returns tuples
    (x, y, base_cost, arrival_cost, template_index), where base_cost is
    node_cost plus the jump length and arrival_cost additionally carries the
    alpha-weighted goal distance of the end cell. A ray containing an obstacle
    (or leaving the map) before its end emits nothing; a fully free ray emits
    its end cell; if the goal sits on a ray closer than n, the goal is emitted
    directly so targets off the n-jump lattice stay reachable.

    ``inspected`` collects flat cell indexes (y * width + x) of every
    in-bounds cell probed, for the search metrics.
    """
    if not grid.is_free(node):
        raise ValueError(f"successor origin {node} is not a free cell")
    if n < 1:
        raise ValueError(f"motion block size must be >= 1, got {n}")
    flat = grid._flat
    width, height = grid.width, grid.height
    x0, y0 = node
    gx, gy = goal
    idx0 = y0 * width + x0
    dgx = gx - x0
    dgy = gy - y0
    goal_near = (dgx or dgy) and max(abs(dgx), abs(dgy)) <= n
    border_near = x0 < n or y0 < n or x0 >= width - n or y0 >= height - n
    out = []
    for i in range(8):
        ux, uy = _OFFSET_TEMPLATE[i]
        if border_near:
            # in-bounds step limit along this ray
            m = n
            if ux > 0:
                m = min(m, width - 1 - x0)
            elif ux < 0:
                m = min(m, x0)
            if uy > 0:
                m = min(m, height - 1 - y0)
            elif uy < 0:
                m = min(m, y0)
            if m == 0:
                continue
        else:
            m = n
        stride = uy * width + ux
        start = idx0 + stride
        stop = idx0 + (m + 1) * stride
        # all m ray cells in one C-level slice; first obstacle via find
        chunk = flat[start:stop:stride] if stop >= 0 else flat[start::stride]
        pos = chunk.find(1)
        if pos < 0:
            probed = free_len = m
        else:
            probed = pos + 1   # the blocking obstacle cell was examined too
            free_len = pos
        steps = 0
        if goal_near:
            # emit the goal directly when it sits on the free prefix of the ray;
            # the walk stops there, so cells beyond it count as unexamined
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
                probed = k
        if inspected is not None:
            inspected.update(range(start, idx0 + (probed + 1) * stride, stride))
        if steps == 0:
            if pos < 0 and m == n:
                steps = n
            elif emit_truncated_steps and free_len >= 1:
                steps = free_len
            else:
                continue
        x = x0 + ux * steps
        y = y0 + uy * steps
        if ux != 0 and uy != 0:
            base = node_cost + steps * SQRT2
            cost = base + alpha * math.hypot(gx - x, gy - y)
            if direction_weighted:
                cost *= SQRT2
        else:
            base = node_cost + steps
            cost = base + alpha * math.hypot(gx - x, gy - y)
        out.append((x, y, base, cost, i))
    return out


def successors(grid: GridMap, node: Coord, node_cost: float, goal: Coord,
               block: MotionBlock, params: AdaptiveCostParams,
               inspected: set[Coord] | None = None,
               emit_truncated_steps: bool = False,
               direction_weighted: bool = False) -> list[Successor]:
    """Generate the successors of ``node`` under the given motion block.

    Each ray of the block is checked cell by cell but only its end cell is
    emitted; see expand_node() for the exact ray rules. The arrival cost of a
    successor is the adaptive movement cost of the jump, accumulable as the
    search g-value.

    ``inspected`` collects every in-bounds cell probed (for search metrics).
    ``emit_truncated_steps`` emits the last free cell of a blocked ray instead
    of dropping it; off by default, kept for ablations on narrow passages.
    ``direction_weighted`` additionally multiplies each arrival cost by the
    direction base cost (1 or sqrt(2)). Compounding that factor through the
    accumulated cost makes long diagonal chains exponentially expensive and
    degrades paths toward axis-aligned staircases, so it is off by default
    and kept only for ablation.
    """
    idx_set: set[int] | None = set() if inspected is not None else None
    raw = expand_node(grid, node, node_cost, goal, block.n, params.alpha,
                      inspected=idx_set,
                      emit_truncated_steps=emit_truncated_steps,
                      direction_weighted=direction_weighted)
    if inspected is not None:
        width = grid.width
        inspected.update((idx % width, idx // width) for idx in idx_set)
    return [Successor(cell=(x, y), arrival_cost=cost, via=block.entries[i])
            for x, y, _base, cost, i in raw]

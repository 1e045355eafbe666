"""Occupancy-grid primitives shared by the planners and the dataset pipeline."""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

# Cell coordinate as (x, y): x grows rightward, y downward (image convention).
Coord = tuple[int, int]


class CellState(Enum):
    FREE = "free"
    OBSTACLE = "obstacle"
    OUT_OF_BOUNDS = "out_of_bounds"


class GridMap:
    """Immutable binary occupancy grid.

    The backing array is indexed ``obstacles[y, x]`` (row-major, y down),
    matching the pixel order of the dataset images. Instances are safe to
    share across concurrent searches: the array is locked after construction
    and all queries are pure.
    """

    __slots__ = ("obstacles", "width", "height", "map_type", "dimension_class",
                 "source_id", "_flat")

    def __init__(self, obstacles, map_type: str = "raw",
                 dimension_class: str = "raw", source_id: str = ""):
        arr = np.array(obstacles, dtype=bool)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("occupancy must be a non-empty 2-D array")
        arr.flags.writeable = False
        self.obstacles = arr
        self.height, self.width = arr.shape
        self.map_type = map_type
        self.dimension_class = dimension_class
        self.source_id = source_id
        # bytes copy for cheap single-cell probes in the search inner loops
        self._flat = arr.astype(np.uint8).tobytes()

    @classmethod
    def empty(cls, width: int, height: int, **meta) -> "GridMap":
        """All-free grid of the given size."""
        return cls(np.zeros((height, width), dtype=bool), **meta)

    @classmethod
    def from_rows(cls, rows: list[str], **meta) -> "GridMap":
        """Build from strings, one per row: '#' marks an obstacle, '.' free."""
        return cls([[ch == "#" for ch in row] for row in rows], **meta)

    def in_bounds(self, c: Coord) -> bool:
        x, y = c
        return 0 <= x < self.width and 0 <= y < self.height

    def cell_state(self, c: Coord) -> CellState:
        x, y = c
        if not (0 <= x < self.width and 0 <= y < self.height):
            return CellState.OUT_OF_BOUNDS
        return CellState.OBSTACLE if self._flat[y * self.width + x] else CellState.FREE

    def is_free(self, c: Coord) -> bool:
        x, y = c
        return (0 <= x < self.width and 0 <= y < self.height
                and not self._flat[y * self.width + x])

    def obstacle_count(self) -> int:
        return int(self.obstacles.sum())

    def __repr__(self) -> str:
        return (f"GridMap({self.width}x{self.height}, type={self.map_type!r}, "
                f"dim={self.dimension_class!r}, source={self.source_id!r})")


def euclidean(p: Coord, q: Coord) -> float:
    """Straight-line distance between two cells, in cell units."""
    return math.hypot(q[0] - p[0], q[1] - p[1])


def ray_cells(origin: Coord, unit_offset: Coord, n: int) -> list[Coord]:
    """Cells along a straight ray: origin + k * unit_offset for k = 1..n.

    The offset must be a unit step (components in {-1, 0, 1}, not both zero),
    so rays are axis-aligned or 45-degree diagonals.
    """
    ux, uy = unit_offset
    if ux not in (-1, 0, 1) or uy not in (-1, 0, 1):
        raise ValueError(f"unit offset components must be in {{-1, 0, 1}}, got {unit_offset}")
    if ux == 0 and uy == 0:
        raise ValueError("unit offset must not be (0, 0)")
    if n < 1:
        raise ValueError(f"ray length must be >= 1, got {n}")
    x, y = origin
    return [(x + k * ux, y + k * uy) for k in range(1, n + 1)]

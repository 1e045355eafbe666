"""Deterministic SVG rendering of maps and search results.

Conventions: white free cells, black obstacles, cyan crosses on expanded
cells, a red polyline for the path, a green circle at the start and a blue
circle at the goal.
"""

from __future__ import annotations

import numpy as np

from .grid import Coord, GridMap
from .ingest import Scenario
from .planners import SearchResult


def _fmt(v: float) -> str:
    return f"{v:g}"


def _obstacle_rects(grid: GridMap) -> list[str]:
    # one rect per horizontal run of obstacles keeps the file small
    rects = []
    for y in range(grid.height):
        row = grid.obstacles[y]
        xs = np.flatnonzero(np.diff(np.concatenate(([0], row.view(np.int8), [0]))))
        for x0, x1 in zip(xs[0::2], xs[1::2]):
            rects.append(f'<rect x="{x0}" y="{y}" width="{x1 - x0}" height="1" fill="black"/>')
    return rects


def _cross_path(cells: list[Coord]) -> str:
    parts = []
    for x, y in cells:
        parts.append(f"M{_fmt(x + 0.2)} {_fmt(y + 0.2)}L{_fmt(x + 0.8)} {_fmt(y + 0.8)}"
                     f"M{_fmt(x + 0.8)} {_fmt(y + 0.2)}L{_fmt(x + 0.2)} {_fmt(y + 0.8)}")
    return "".join(parts)


def _circle(c: Coord, color: str) -> str:
    return (f'<circle cx="{_fmt(c[0] + 0.5)}" cy="{_fmt(c[1] + 0.5)}" '
            f'r="1.2" fill="{color}"/>')


def render_svg(grid: GridMap, result: SearchResult | None = None,
               scenario: Scenario | None = None, scale: int = 3) -> str:
    """Render a map, optionally overlaid with one search result.

    Endpoint circles come from the scenario when given, otherwise from the
    path ends. Raises ValueError if the result references cells outside the
    map, which catches a result paired with the wrong map.
    """
    if result is not None:
        for c in list(result.path) + list(result.expanded_nodes):
            if not grid.in_bounds(c):
                raise ValueError(f"result cell {c} is outside the {grid.width}x"
                                 f"{grid.height} map; map/result mismatch?")
    w, h = grid.width, grid.height
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * scale}" '
        f'height="{h * scale}" viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]
    lines.extend(_obstacle_rects(grid))
    if result is not None:
        if result.expanded_nodes:
            lines.append(f'<path d="{_cross_path(result.expanded_nodes)}" '
                         f'stroke="cyan" stroke-width="0.15" fill="none"/>')
        if len(result.path) >= 2:
            points = " ".join(f"{_fmt(x + 0.5)},{_fmt(y + 0.5)}" for x, y in result.path)
            lines.append(f'<polyline points="{points}" stroke="red" '
                         f'stroke-width="0.4" fill="none"/>')
    endpoints = None
    if scenario is not None:
        endpoints = (scenario.start, scenario.goal)
    elif result is not None and result.path:
        endpoints = (result.path[0], result.path[-1])
    if endpoints:
        lines.append(_circle(endpoints[0], "green"))
        lines.append(_circle(endpoints[1], "blue"))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"

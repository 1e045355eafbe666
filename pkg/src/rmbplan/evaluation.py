"""Metric aggregation, block-size selection, and the comparison formulas.

Selection works on a sweep table: per (map type, dimension) group, the mean
search cells, path cost and time for each block size n. Each parameter row is
scaled to [0, 1000], the three rows are averaged element-wise, and the group
averages are averaged again; the best size is the argmin of that final row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

PARAMETERS = ("search_cells", "path_cost", "time_s")
RANGE_SCALE_MAX = 1000.0

# Normalization ceilings for the performance percentage: mean cell capacity of
# the three map dimensions, and assumed path-cost / time ranges.
PERFORMANCE_RANGES = {"search_cells": 133654.33, "path_cost": 4500.0, "time_s": 20.0}


def range_scale(values: list[float], r: float = RANGE_SCALE_MAX) -> list[float]:
    """Affinely rescale so min -> 0 and max -> r; a constant row maps to all
    zeros (a criterion that never varies should not influence selection)."""
    if len(values) == 0:
        raise ValueError("cannot range-scale an empty array")
    lo = min(values)
    hi = max(values)
    if hi == lo:
        return [0.0] * len(values)
    return [r * (v - lo) / (hi - lo) for v in values]


def param_average(rows: list[list[float]]) -> list[float]:
    """Element-wise arithmetic mean of equally long parameter rows."""
    if not rows:
        raise ValueError("need at least one row")
    length = len(rows[0])
    for row in rows[1:]:
        if len(row) != length:
            raise ValueError(f"row length mismatch: {len(row)} vs {length}")
    return [sum(row[j] for row in rows) / len(rows) for j in range(length)]


def optimal_rmb(group_averages: list[list[float]],
                sizes: list[int] | None = None) -> int:
    """Block size whose mean score across all groups is minimal.

    Ties break toward the smaller size (finer steps, conservative choice).
    """
    if not group_averages:
        raise ValueError("need at least one group average row")
    combined = param_average(group_averages)
    if sizes is None:
        sizes = list(range(1, len(combined) + 1))
    if len(sizes) != len(combined):
        raise ValueError(f"{len(sizes)} sizes for {len(combined)} columns")
    best = min(range(len(combined)), key=lambda j: (combined[j], j))
    return sizes[best]


def impact_evaluation(x: list[float], y: list[float]) -> float:
    """Percentage reduction of y relative to x, summed element-wise:
    (sum(x) - sum(y)) / sum(x) * 100."""
    if len(x) == 0 or len(x) != len(y):
        raise ValueError("x and y must be equal-length, non-empty arrays")
    sx = sum(x)
    if sx == 0:
        raise ValueError("sum of the baseline array is zero")
    return (sx - sum(y)) / sx * 100.0


def performance_calc(dimension_avgs: list[float], mx: float) -> float:
    """Mean of the per-dimension averages as a percentage of the range ceiling mx."""
    if mx <= 0:
        raise ValueError(f"range ceiling must be positive, got {mx}")
    if not dimension_avgs:
        raise ValueError("need at least one dimension average")
    return sum(dimension_avgs) / len(dimension_avgs) / mx * 100.0


@dataclass
class GroupSelection:
    map_type: str
    dimension_class: str
    ranged: dict[str, list[float]]       # per parameter, scaled to [0, 1000]
    average: list[float]                 # element-wise mean of the three rows
    best_n: int                          # per-group argmin
    disagrees: bool = False              # True if best_n != the global choice


@dataclass
class SelectionReport:
    sizes: list[int]
    groups: list[GroupSelection]
    combined: list[float]                # mean of all group averages
    optimal_n: int
    excluded_groups: list[tuple[str, str]] = field(default_factory=list)


def select_optimal_rmb(sweep: dict[tuple[str, str], dict[str, list[float]]],
                       sizes: list[int] | None = None) -> SelectionReport:
    """Run the full selection pipeline over a sweep table.

    `sweep` maps (map_type, dimension_class) to {parameter: [mean per n]}.
    Groups with a missing or incomplete parameter row are excluded and listed
    in the report.
    """
    groups: list[GroupSelection] = []
    excluded: list[tuple[str, str]] = []
    length = None
    for (map_type, dim), rows in sorted(sweep.items()):
        if any(p not in rows or not rows[p] or any(v is None for v in rows[p])
               for p in PARAMETERS):
            excluded.append((map_type, dim))
            continue
        if length is None:
            length = len(rows[PARAMETERS[0]])
        if any(len(rows[p]) != length for p in PARAMETERS):
            excluded.append((map_type, dim))
            continue
        ranged = {p: range_scale(rows[p]) for p in PARAMETERS}
        average = param_average([ranged[p] for p in PARAMETERS])
        group_sizes = sizes if sizes is not None else list(range(1, length + 1))
        groups.append(GroupSelection(
            map_type=map_type, dimension_class=dim, ranged=ranged,
            average=average, best_n=optimal_rmb([average], group_sizes)))
    if not groups:
        raise ValueError("no complete sweep groups to select from")
    group_sizes = sizes if sizes is not None else list(range(1, length + 1))
    combined = param_average([g.average for g in groups])
    chosen = optimal_rmb([g.average for g in groups], group_sizes)
    for g in groups:
        g.disagrees = g.best_n != chosen
    return SelectionReport(sizes=group_sizes, groups=groups, combined=combined,
                           optimal_n=chosen, excluded_groups=excluded)


def load_reference_tables() -> dict:
    """Bundled reference benchmark tables used by the comparison checks."""
    text = resources.files("rmbplan").joinpath("data/reference_tables.json").read_text()
    return json.loads(text)


def reference_sweep(tables: dict) -> dict[tuple[str, str], dict[str, list[float]]]:
    """Reference sweep table in the shape select_optimal_rmb() consumes."""
    return {(g["map_type"], g["dimension_class"]): {p: g[p] for p in PARAMETERS}
            for g in tables["rmb_sweep"]}

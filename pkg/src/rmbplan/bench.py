"""Benchmark orchestration: cache preparation, sweep execution, aggregation.

Preparation turns the raw PNG inventory into the three dimension classes per
map type (singles, side-by-side pairs, 2x2 quads of consecutive tiles) and
caches them as PGM files plus a manifest. The runner executes the configured
(map x scenario x algorithm x n) product and emits per-run records along with
sweep and comparison mean tables.
"""

from __future__ import annotations

import csv
import json
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from .evaluation import PARAMETERS
from .ingest import (DIMENSION_CLASSES, MAP_TYPES, DatasetInventory, Scenario,
                     add_borders, generate_scenarios, load_dataset,
                     load_png, load_prepared_map, load_scenario_overrides,
                     stitch, write_pgm)
from .motion import AdaptiveCostParams
from .planners import SearchStatus, rmb_astar, run_planner

MANIFEST_NAME = "manifest.json"

# (layout, tiles consumed per prepared map, divisor on the per-type cap)
_LAYOUTS = (("1x1", 1, 1), ("2x1", 2, 2), ("2x2", 4, 4))


def prepared_counts(cap: int) -> dict[str, int]:
    """Prepared maps per dimension class for a per-type tile cap.

    The pairs and quads reuse the same capped tile sequence, so a cap of 800
    yields 800 / 400 / 200 maps and a cap of 20 yields 20 / 10 / 5.
    """
    return {"1x1": cap, "2x1": cap // 2, "2x2": cap // 4}


@dataclass
class RunConfig:
    dataset_root: Path
    out_dir: Path
    map_types: tuple[str, ...] = MAP_TYPES
    dimensions: tuple[str, ...] = DIMENSION_CLASSES
    algorithms: tuple[str, ...] = ("rmb-astar",)
    rmb_sizes: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    alpha: float = 0.007
    cap: int | None = None
    scenario_overrides: Path | None = None
    jobs: int = 1
    seed: int = 0
    record_format: str = "csv"
    fallback_to_n1: bool = False

    def __post_init__(self):
        self.dataset_root = Path(self.dataset_root)
        self.out_dir = Path(self.out_dir)
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.record_format not in ("csv", "json"):
            raise ValueError(f"record format must be csv or json, got {self.record_format!r}")


@dataclass
class RunRecord:
    """One planner execution, flattened for table output."""
    map_id: str
    map_type: str
    dimension_class: str
    direction_id: int
    algorithm_id: str
    rmb_n: int
    status: str
    path_cost: float
    expanded_cells: int
    inspected_cells: int
    wall_time: float
    path_len: int
    fallback: int = 0


_RECORD_FIELDS = list(RunRecord.__dataclass_fields__)
_INT_FIELDS = {"direction_id", "rmb_n", "expanded_cells", "inspected_cells",
               "path_len", "fallback"}
_FLOAT_FIELDS = {"path_cost", "wall_time"}


def prepare_cache(dataset_root: str | Path, out_dir: str | Path,
                  map_types: tuple[str, ...] | None = None,
                  cap: int = 800) -> dict:
    """Build the prepared-map cache under `<out_dir>/prepared` and return the
    manifest. Re-running with unchanged inputs rewrites identical bytes."""
    inventory = load_dataset(dataset_root)
    if map_types:
        inventory = DatasetInventory(
            entries=[e for e in inventory.entries if e.map_type in map_types],
            counts={t: c for t, c in inventory.counts.items() if t in map_types},
            skipped=inventory.skipped)
    prepared_dir = Path(out_dir) / "prepared"
    prepared_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    counts: dict[str, dict[str, int]] = {}
    for map_type in (map_types or MAP_TYPES):
        tiles = inventory.by_type(map_type)[:cap]
        if not tiles:
            continue
        decoded: dict[int, object] = {}

        def tile(i: int):
            if i not in decoded:
                decoded[i] = load_png(tiles[i].path)
            return decoded[i]

        for layout, per_map, divisor in _LAYOUTS:
            n_maps = len(tiles) // per_map
            for k in range(n_maps):
                group = list(range(k * per_map, (k + 1) * per_map))
                raw = stitch([tile(i) for i in group], layout)
                bordered = add_borders(raw)
                dim = f"{bordered.width}x{bordered.height}"
                source_id = "+".join(tiles[i].source_id for i in group)
                rel = Path(map_type) / dim / f"{k:04d}__{source_id}.pgm"
                dest = prepared_dir / rel
                dest.parent.mkdir(parents=True, exist_ok=True)
                tmp = dest.with_suffix(".pgm.tmp")
                try:
                    write_pgm(tmp, bordered)
                    tmp.replace(dest)
                except BaseException:
                    tmp.unlink(missing_ok=True)
                    raise
                entries.append({"path": rel.as_posix(), "map_type": map_type,
                                "dimension_class": dim, "source_id": source_id})
                counts.setdefault(map_type, {})
                counts[map_type][dim] = counts[map_type].get(dim, 0) + 1
    manifest = {"version": 1, "cap": cap, "counts": counts,
                "skipped_inputs": inventory.skipped,
                "entries": sorted(entries, key=lambda e: e["path"])}
    manifest_path = prepared_dir / MANIFEST_NAME
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def _find_manifest(root: Path) -> Path:
    for candidate in (root / MANIFEST_NAME, root / "prepared" / MANIFEST_NAME):
        if candidate.is_file():
            return candidate
    raise FileNotFoundError(
        f"no prepared-map manifest under {root}; run the prepare step first")


def _run_map_task(payload: dict) -> list[dict]:
    """Execute all configured algorithms on one prepared map (pool-safe)."""
    grid = load_prepared_map(payload["pgm"], map_type=payload["map_type"],
                             dimension_class=payload["dimension_class"],
                             source_id=payload["map_id"])
    scenario = Scenario(start=tuple(payload["start"]), goal=tuple(payload["goal"]),
                        direction_id=payload["direction_id"])
    params = AdaptiveCostParams(alpha=payload["alpha"])
    records = []

    def to_record(result, rmb_n, fallback=0):
        return {
            "map_id": payload["map_id"], "map_type": payload["map_type"],
            "dimension_class": payload["dimension_class"],
            "direction_id": payload["direction_id"],
            "algorithm_id": result.algorithm_id, "rmb_n": rmb_n,
            "status": result.status.value, "path_cost": result.path_cost,
            "expanded_cells": result.expanded_cells,
            "inspected_cells": result.inspected_cells,
            "wall_time": result.wall_time, "path_len": len(result.path),
            "fallback": fallback,
        }

    for algo in payload["algorithms"]:
        if algo == "rmb-astar":
            for n in payload["rmb_sizes"]:
                result = rmb_astar(grid, scenario, n, params)
                fallback = 0
                if (result.status is SearchStatus.NOT_FOUND
                        and payload["fallback_to_n1"] and n != 1):
                    result = rmb_astar(grid, scenario, 1, params)
                    fallback = 1
                records.append(to_record(result, n, fallback))
        else:
            records.append(to_record(run_planner(algo, grid, scenario), 0))
    return records


def _build_tasks(config: RunConfig, manifest: dict, prepared_dir: Path) -> list[dict]:
    overrides = (load_scenario_overrides(config.scenario_overrides)
                 if config.scenario_overrides else None)
    tasks = []
    for map_type in config.map_types:
        for dim in config.dimensions:
            group = [e for e in manifest["entries"]
                     if e["map_type"] == map_type and e["dimension_class"] == dim]
            group.sort(key=lambda e: e["path"])
            if config.cap is not None and len(group) > config.cap:
                rng = random.Random(config.seed)
                group = sorted(rng.sample(group, config.cap), key=lambda e: e["path"])
            scenarios = generate_scenarios(dim, overrides)
            for i, entry in enumerate(group):
                scenario = scenarios[i % 4]
                tasks.append({
                    "pgm": str(prepared_dir / entry["path"]),
                    "map_id": entry["path"], "map_type": map_type,
                    "dimension_class": dim,
                    "direction_id": scenario.direction_id,
                    "start": list(scenario.start), "goal": list(scenario.goal),
                    "algorithms": list(config.algorithms),
                    "rmb_sizes": list(config.rmb_sizes),
                    "alpha": config.alpha,
                    "fallback_to_n1": config.fallback_to_n1,
                })
    return tasks


def run_benchmark(config: RunConfig) -> tuple[list[RunRecord], dict]:
    """Run the configured sweep over the prepared cache.

    Returns the records and a summary dict; also writes records, the sweep
    table, the comparison table and the summary into config.out_dir.
    """
    manifest_path = _find_manifest(config.dataset_root)
    prepared_dir = manifest_path.parent
    manifest = json.loads(manifest_path.read_text())
    tasks = _build_tasks(config, manifest, prepared_dir)

    started = time.perf_counter()
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            chunks = list(pool.map(_run_map_task, tasks))
    else:
        chunks = [_run_map_task(t) for t in tasks]
    records = [RunRecord(**r) for chunk in chunks for r in chunk]
    elapsed = time.perf_counter() - started

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if config.record_format == "json":
        emit_records_json(records, out_dir / "records.json")
    else:
        emit_records_csv(records, out_dir / "records.csv")
    sweep = sweep_table(records)
    write_sweep_csv(sweep, sorted(config.rmb_sizes), out_dir / "sweep.csv")
    comparison = comparison_table(records)
    write_comparison_csv(comparison, out_dir / "comparison.csv")
    summary = {
        "maps": len(tasks),
        "records": len(records),
        "not_found": sum(1 for r in records if r.status != "found"),
        "elapsed_s": elapsed,
        "seed": config.seed,
        "cap": config.cap,
        "alpha": config.alpha,
        "algorithms": list(config.algorithms),
        "rmb_sizes": list(config.rmb_sizes),
        "excluded_from_means": {
            f"{k[0]}/{k[1]}/{k[2]}/n={k[3]}": v
            for k, v in sorted(not_found_counts(records).items())
        },
    }
    (out_dir / "run_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return records, summary


# ---------------------------------------------------------------------------
# record serialization

def emit_records_csv(records: list[RunRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_RECORD_FIELDS)
        for r in records:
            d = asdict(r)
            writer.writerow([d[f] for f in _RECORD_FIELDS])


def parse_records_csv(path: str | Path) -> list[RunRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            kwargs = {}
            for f in _RECORD_FIELDS:
                v = row[f]
                if f in _INT_FIELDS:
                    kwargs[f] = int(v)
                elif f in _FLOAT_FIELDS:
                    kwargs[f] = float(v)
                else:
                    kwargs[f] = v
            records.append(RunRecord(**kwargs))
    return records


def emit_records_json(records: list[RunRecord], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps([asdict(r) for r in records], indent=2) + "\n")


def parse_records_json(path: str | Path) -> list[RunRecord]:
    return [RunRecord(**d) for d in json.loads(Path(path).read_text())]


# ---------------------------------------------------------------------------
# aggregation

def not_found_counts(records: list[RunRecord]) -> dict:
    out: dict[tuple, int] = {}
    for r in records:
        if r.status != "found":
            key = (r.map_type, r.dimension_class, r.algorithm_id, r.rmb_n)
            out[key] = out.get(key, 0) + 1
    return out


def _metric(r: RunRecord, parameter: str) -> float:
    return {"search_cells": float(r.expanded_cells), "path_cost": r.path_cost,
            "time_s": r.wall_time}[parameter]


def sweep_table(records: list[RunRecord]) -> dict:
    """Mean metrics per (map_type, dimension_class) and block size, over the
    found rmb-astar runs only. Missing cells are None."""
    groups: dict[tuple[str, str], dict[int, list[RunRecord]]] = {}
    for r in records:
        if r.algorithm_id != "rmb-astar" or r.status != "found":
            continue
        groups.setdefault((r.map_type, r.dimension_class), {}) \
              .setdefault(r.rmb_n, []).append(r)
    sizes = sorted({n for per_n in groups.values() for n in per_n})
    table = {}
    for key, per_n in sorted(groups.items()):
        table[key] = {
            p: [statistics.fmean(_metric(r, p) for r in per_n[n])
                if n in per_n else None for n in sizes]
            for p in PARAMETERS
        }
    return table


def write_sweep_csv(sweep: dict, sizes: list[int], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["map_type", "dimension_class", "parameter"]
                        + [f"n={n}" for n in sizes])
        for (map_type, dim), rows in sorted(sweep.items()):
            for p in PARAMETERS:
                values = rows[p]
                writer.writerow([map_type, dim, p]
                                + ["" if v is None else v for v in values])


def parse_sweep_csv(path: str | Path) -> tuple[dict, list[int]]:
    table: dict[tuple[str, str], dict[str, list]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        sizes = [int(col.split("=", 1)[1]) for col in header[3:]]
        for row in reader:
            map_type, dim, parameter = row[0], row[1], row[2]
            values = [float(v) if v != "" else None for v in row[3:]]
            table.setdefault((map_type, dim), {})[parameter] = values
    return table, sizes


def comparison_table(records: list[RunRecord]) -> list[dict]:
    """Per-algorithm mean metrics by dimension plus an across-dimension
    average, over found runs; rmb-astar keyed per block size."""
    groups: dict[tuple[str, int], dict[str, list[RunRecord]]] = {}
    for r in records:
        if r.status != "found":
            continue
        groups.setdefault((r.algorithm_id, r.rmb_n), {}) \
              .setdefault(r.dimension_class, []).append(r)
    out = []
    for (algo, n), per_dim in sorted(groups.items()):
        dims = {
            dim: {p: statistics.fmean(_metric(r, p) for r in rs_)
                  for p in PARAMETERS}
            for dim, rs_ in sorted(per_dim.items())
        }
        average = {p: statistics.fmean(d[p] for d in dims.values())
                   for p in PARAMETERS}
        out.append({"algorithm": algo, "rmb_n": n,
                    "per_dimension": dims, "average": average})
    return out


def write_comparison_csv(comparison: list[dict], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "rmb_n", "dimension_class"] + list(PARAMETERS))
        for row in comparison:
            for dim, metrics in row["per_dimension"].items():
                writer.writerow([row["algorithm"], row["rmb_n"], dim]
                                + [metrics[p] for p in PARAMETERS])
            writer.writerow([row["algorithm"], row["rmb_n"], "average"]
                            + [row["average"][p] for p in PARAMETERS])

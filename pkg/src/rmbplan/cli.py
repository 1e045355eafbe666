"""Command-line benchmark harness.

Subcommands: prepare (build the map cache), run (execute a sweep), select
(pick the best block size from a sweep), compare (reduction and performance
percentages), render (draw one search as SVG).

Exit codes: 0 success, 1 usage error, 2 dataset or I/O error, 3 reference
mismatch from `compare --check`.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import (RunConfig, comparison_table, parse_records_csv,
                    parse_records_json, parse_sweep_csv, prepare_cache,
                    run_benchmark)
from .evaluation import (PARAMETERS, PERFORMANCE_RANGES, impact_evaluation,
                         load_reference_tables, performance_calc,
                         reference_sweep, select_optimal_rmb)
from .ingest import (DIMENSION_CLASSES, MAP_TYPES, Scenario,
                     generate_scenarios, load_prepared_map)
from .motion import AdaptiveCostParams
from .planners import run_planner
from .render import render_svg

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MISMATCH = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the harness contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self.exit_code_usage(message))

    def exit_code_usage(self, message):
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        return EXIT_USAGE


def _coord(text: str) -> tuple[int, int]:
    try:
        x, y = text.split(",")
        return int(x), int(y)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rmbplan", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_prep = sub.add_parser("prepare", help="decode, stitch and border the dataset maps")
    p_prep.add_argument("--dataset-dir", required=True, type=Path,
                        help="root of the raw PNG dataset (one directory per map type)")
    p_prep.add_argument("--out-dir", required=True, type=Path,
                        help="destination; the cache lands in <out-dir>/prepared")
    p_prep.add_argument("--map-type", action="append", choices=MAP_TYPES,
                        help="restrict to a map type (repeatable)")
    p_prep.add_argument("--cap", type=int, default=800,
                        help="tiles per map type (default 800)")

    p_run = sub.add_parser("run", help="execute planners over the prepared maps")
    p_run.add_argument("--dataset-dir", required=True, type=Path,
                       help="prepared-map root (the prepare step's out dir)")
    p_run.add_argument("--out-dir", required=True, type=Path)
    p_run.add_argument("--map-type", action="append", choices=MAP_TYPES)
    p_run.add_argument("--dimension", action="append", choices=DIMENSION_CLASSES)
    p_run.add_argument("--algo", action="append",
                       choices=("rmb-astar", "astar", "dijkstra", "bfs", "dfs"),
                       help="algorithm to run (repeatable; default rmb-astar)")
    p_run.add_argument("--n", action="append", type=int,
                       help="block size for rmb-astar (repeatable; default 1..6)")
    p_run.add_argument("--alpha", type=float, default=0.007)
    p_run.add_argument("--cap", type=int, help="maps per (type, dimension) group")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--seed", type=int, default=0,
                       help="seed for map subsampling when --cap cuts the corpus")
    p_run.add_argument("--scenarios", type=Path,
                       help="JSON scenario override file")
    p_run.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="record output format (tables are always CSV)")
    p_run.add_argument("--fallback-n1", action="store_true",
                       help="re-run failed rmb-astar searches with n=1")

    p_sel = sub.add_parser("select", help="range-scale a sweep and pick the block size")
    src = p_sel.add_mutually_exclusive_group(required=True)
    src.add_argument("--sweep", type=Path, help="sweep.csv from a run")
    src.add_argument("--fixture", action="store_true",
                     help="use the bundled reference sweep")
    p_sel.add_argument("--out-dir", type=Path, help="write ranged.csv and selection.json")

    p_cmp = sub.add_parser("compare",
                           help="impact and performance percentages vs conventional A*")
    src = p_cmp.add_mutually_exclusive_group(required=True)
    src.add_argument("--results", type=Path,
                     help="records file from a run (.csv or .json)")
    src.add_argument("--fixture", action="store_true",
                     help="use the bundled reference comparison")
    p_cmp.add_argument("--n", type=int, default=3,
                       help="rmb-astar block size to compare (default 3)")
    p_cmp.add_argument("--check", action="store_true",
                       help="verify the fixture pipeline against its recorded "
                            "expectations; exit 3 on mismatch")

    p_ren = sub.add_parser("render", help="run one search and write an SVG")
    p_ren.add_argument("--map", required=True, type=Path, help="prepared PGM map")
    p_ren.add_argument("--algo", default="rmb-astar",
                       choices=("rmb-astar", "astar", "dijkstra", "bfs", "dfs"))
    p_ren.add_argument("--n", type=int, default=3)
    p_ren.add_argument("--alpha", type=float, default=0.007)
    p_ren.add_argument("--direction", type=int, choices=(1, 2, 3, 4),
                       help="use a default scenario of the map's dimension class")
    p_ren.add_argument("--start", type=_coord, help="start cell as 'x,y'")
    p_ren.add_argument("--goal", type=_coord, help="goal cell as 'x,y'")
    p_ren.add_argument("--out", required=True, type=Path, help="output SVG path")
    return parser


def _cmd_prepare(args) -> int:
    manifest = prepare_cache(args.dataset_dir, args.out_dir,
                             map_types=tuple(args.map_type) if args.map_type else None,
                             cap=args.cap)
    for map_type, dims in sorted(manifest["counts"].items()):
        counts = ", ".join(f"{d}: {c}" for d, c in sorted(dims.items()))
        print(f"{map_type}: {counts}")
    print(f"prepared {len(manifest['entries'])} maps under "
          f"{Path(args.out_dir) / 'prepared'}")
    return EXIT_OK


def _cmd_run(args) -> int:
    config = RunConfig(
        dataset_root=args.dataset_dir,
        out_dir=args.out_dir,
        map_types=tuple(args.map_type) if args.map_type else MAP_TYPES,
        dimensions=tuple(args.dimension) if args.dimension else DIMENSION_CLASSES,
        algorithms=tuple(args.algo) if args.algo else ("rmb-astar",),
        rmb_sizes=tuple(args.n) if args.n else (1, 2, 3, 4, 5, 6),
        alpha=args.alpha,
        cap=args.cap,
        scenario_overrides=args.scenarios,
        jobs=args.jobs,
        seed=args.seed,
        record_format=args.format,
        fallback_to_n1=args.fallback_n1,
    )
    records, summary = run_benchmark(config)
    print(f"{summary['records']} records over {summary['maps']} maps "
          f"({summary['not_found']} not found) in {summary['elapsed_s']:.1f}s")
    print(f"tables written to {config.out_dir}")
    return EXIT_OK


def _cmd_select(args) -> int:
    if args.fixture:
        sweep = reference_sweep(load_reference_tables())
        sizes = load_reference_tables()["rmb_sizes"]
    else:
        sweep, sizes = parse_sweep_csv(args.sweep)
    report = select_optimal_rmb(sweep, sizes)
    print(f"optimal block size: n={report.optimal_n}")
    for g in report.groups:
        flag = f" (group minimum n={g.best_n})" if g.disagrees else ""
        print(f"  {g.map_type} {g.dimension_class}: "
              + " ".join(f"{v:.2f}" for v in g.average) + flag)
    for map_type, dim in report.excluded_groups:
        print(f"  {map_type} {dim}: incomplete, excluded")
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_ranged_csv(report, out / "ranged.csv")
        (out / "selection.json").write_text(json.dumps({
            "optimal_n": report.optimal_n,
            "combined": report.combined,
            "groups": [{"map_type": g.map_type, "dimension_class": g.dimension_class,
                        "average": g.average, "best_n": g.best_n,
                        "disagrees": g.disagrees} for g in report.groups],
            "excluded_groups": [list(k) for k in report.excluded_groups],
        }, indent=2) + "\n")
        print(f"selection written to {out}")
    return EXIT_OK


def _write_ranged_csv(report, path: Path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["map_type", "dimension_class", "parameter"]
                        + [f"n={n}" for n in report.sizes])
        for g in report.groups:
            for p in PARAMETERS:
                writer.writerow([g.map_type, g.dimension_class, p] + g.ranged[p])
            writer.writerow([g.map_type, g.dimension_class, "average"] + g.average)


def _comparison_rows(args) -> list[dict]:
    if args.fixture:
        return load_reference_tables()["algorithm_comparison"]
    if args.results.suffix == ".json":
        records = parse_records_json(args.results)
    else:
        records = parse_records_csv(args.results)
    return comparison_table(records)


def _cmd_compare(args) -> int:
    rows = _comparison_rows(args)
    by_key = {(r["algorithm"], r.get("rmb_n", 0)): r for r in rows}
    astar = by_key.get(("astar", 0))
    proposed = by_key.get(("rmb-astar", args.n))
    if astar is None or proposed is None:
        print(f"compare needs both astar and rmb-astar n={args.n} rows "
              f"(have: {sorted(by_key)})", file=sys.stderr)
        return EXIT_DATA

    print(f"impact of rmb-astar n={args.n} vs conventional astar "
          f"(positive = reduction):")
    impact = {}
    for p in PARAMETERS:
        dims = sorted(set(astar["per_dimension"]) & set(proposed["per_dimension"]))
        x = [astar["per_dimension"][d][p] for d in dims]
        y = [proposed["per_dimension"][d][p] for d in dims]
        impact[p] = impact_evaluation(x, y)
        print(f"  {p}: {impact[p]:.2f}%")
    print("performance percentage of range ceiling (lower is better):")
    for row in rows:
        label = row["algorithm"] + (f"[n={row['rmb_n']}]"
                                    if row["algorithm"] == "rmb-astar" else "")
        values = []
        for p in PARAMETERS:
            dims = sorted(row["per_dimension"])
            avgs = [row["per_dimension"][d][p] for d in dims]
            values.append(f"{p}={performance_calc(avgs, PERFORMANCE_RANGES[p]):.2f}%")
        print(f"  {label}: " + " ".join(values))

    if args.check:
        tables = load_reference_tables()
        expected = tables["expected"]
        report = select_optimal_rmb(reference_sweep(tables), tables["rmb_sizes"])
        failures = []
        if report.optimal_n != expected["optimal_n"]:
            failures.append(f"optimal n {report.optimal_n} != {expected['optimal_n']}")
        checks = (("search_cells", expected["impact_vs_astar"]["search_cells_pct"]),
                  ("time_s", expected["impact_vs_astar"]["time_s_pct"]))
        for p, want in checks:
            if abs(impact[p] - want) > 0.01:
                failures.append(f"impact {p} {impact[p]:.4f} != {want}")
        if failures:
            for f in failures:
                print(f"reference mismatch: {f}", file=sys.stderr)
            return EXIT_MISMATCH
        print("reference checks passed")
    return EXIT_OK


def _cmd_render(args) -> int:
    grid = load_prepared_map(args.map)
    if args.start and args.goal:
        scenario = Scenario(start=args.start, goal=args.goal,
                            direction_id=args.direction or 0)
    elif args.direction:
        dim = f"{grid.width}x{grid.height}"
        scenario = generate_scenarios(dim)[args.direction - 1]
    else:
        raise ValueError("render needs --start and --goal, or --direction")
    params = AdaptiveCostParams(alpha=args.alpha)
    result = run_planner(args.algo, grid, scenario, n=args.n, params=params)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(render_svg(grid, result, scenario))
    print(f"{args.algo} {result.status.value}: cost {result.path_cost:.2f}, "
          f"{result.expanded_cells} cells expanded; wrote {args.out}")
    return EXIT_OK


_COMMANDS = {"prepare": _cmd_prepare, "run": _cmd_run, "select": _cmd_select,
             "compare": _cmd_compare, "render": _cmd_render}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (FileNotFoundError, OSError) as exc:
        print(f"rmbplan: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"rmbplan: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    raise SystemExit(main())

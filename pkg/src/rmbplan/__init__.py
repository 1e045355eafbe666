"""Grid path planning with a distance-n robot motion block A* variant.

The package bundles the planner and its baselines (conventional A*, Dijkstra,
BFS, DFS), the dataset preparation pipeline for the benchmark maps, the
block-size selection and comparison formulas, and a CLI harness.
"""

from .grid import CellState, Coord, GridMap, euclidean, ray_cells
from .ingest import (DIMENSION_CLASSES, MAP_TYPES, DatasetInventory, RawBitmap,
                     Scenario, add_borders, default_scenarios,
                     generate_scenarios, load_dataset, load_png,
                     load_prepared_map, load_scenario_overrides, read_pgm,
                     stitch, threshold_bitmap, write_pgm)
from .motion import (AdaptiveCostParams, DirectionClass, MotionBlock,
                     MotionVector, Successor, adaptive_cost,
                     build_motion_block, move_cost, successors)
from .planners import (ALGORITHM_IDS, OpenList, SearchResult, SearchStatus,
                       astar_conventional, baseline_search, check_path,
                       path_geometric_cost, rmb_astar, run_planner)
from .evaluation import (PERFORMANCE_RANGES, SelectionReport, impact_evaluation,
                         load_reference_tables, optimal_rmb, param_average,
                         performance_calc, range_scale, select_optimal_rmb)
from .bench import (RunConfig, RunRecord, comparison_table, parse_records_csv,
                    prepare_cache, prepared_counts, run_benchmark, sweep_table)
from .render import render_svg

__version__ = "0.1.0"

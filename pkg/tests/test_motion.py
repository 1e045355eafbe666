import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rmbplan import (AdaptiveCostParams, DirectionClass, GridMap,
                     adaptive_cost, build_motion_block, euclidean, move_cost,
                     ray_cells, successors)

SQRT2 = math.sqrt(2)


def offsets(block):
    return {mv.offset for mv in block.entries}


def test_block_n1_is_the_eight_neighborhood():
    assert offsets(build_motion_block(1)) == {
        (1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)}


def test_block_n3_offsets():
    assert offsets(build_motion_block(3)) == {
        (3, 0), (0, 3), (-3, 0), (0, -3), (3, 3), (3, -3), (-3, 3), (-3, -3)}


@pytest.mark.parametrize("n", [0, -2])
def test_block_rejects_degenerate_sizes(n):
    with pytest.raises(ValueError):
        build_motion_block(n)


@given(st.integers(1, 50))
def test_block_entries_have_chebyshev_norm_n(n):
    block = build_motion_block(n)
    assert len(block.entries) == 8
    for mv in block.entries:
        assert max(abs(mv.offset[0]), abs(mv.offset[1])) == n
        diagonal = mv.offset[0] != 0 and mv.offset[1] != 0
        assert mv.direction_class is (
            DirectionClass.DIAGONAL if diagonal else DirectionClass.CARDINAL)
        assert mv.base_cost == (SQRT2 if diagonal else 1.0)


def test_alpha_default_and_range():
    assert AdaptiveCostParams().alpha == 0.007
    AdaptiveCostParams(alpha=0.001)
    AdaptiveCostParams(alpha=0.009)
    AdaptiveCostParams(alpha=0.0)  # goal bias off, for ablation
    for bad in (0.0005, 0.5, -0.007):
        with pytest.raises(ValueError):
            AdaptiveCostParams(alpha=bad)


def test_adaptive_cost_hand_computed():
    # 0 + 1 + 9 * 0.007
    assert adaptive_cost(0.0, (0, 0), (1, 0), (10, 0), 0.007) == pytest.approx(
        1.063, abs=1e-12)


def test_adaptive_cost_goal_term_vanishes_at_goal():
    got = adaptive_cost(5.0, (0, 0), (1, 1), (1, 1), 0.007)
    assert got == pytest.approx(5 + SQRT2, abs=1e-12)


def test_adaptive_cost_alpha_zero():
    got = adaptive_cost(2.0, (0, 0), (3, 4), (90, 90), 0.0)
    assert got == 2.0 + 5.0


@given(st.floats(0, 1e6), st.floats(0, 0.009),
       st.tuples(st.integers(0, 200), st.integers(0, 200)),
       st.tuples(st.integers(0, 200), st.integers(0, 200)),
       st.tuples(st.integers(0, 200), st.integers(0, 200)))
def test_adaptive_cost_bounds_and_monotonicity(ccn, alpha, cn, q, gn):
    c = adaptive_cost(ccn, cn, q, gn, alpha)
    assert c >= ccn + euclidean(cn, q) - 1e-9
    assert adaptive_cost(ccn + 1.0, cn, q, gn, alpha) >= c
    assert adaptive_cost(ccn, cn, q, gn, min(alpha + 0.001, 0.009)) >= c - 1e-12


def test_move_cost():
    assert move_cost(DirectionClass.CARDINAL, 1.063) == 1.063
    assert move_cost(DirectionClass.DIAGONAL, 2.0) == pytest.approx(
        2.8284271, abs=1e-6)
    assert move_cost(DirectionClass.DIAGONAL, 0.0) == 0.0


def _successor_cells(grid, node, goal, n, **kw):
    block = build_motion_block(n)
    params = AdaptiveCostParams()
    return {s.cell for s in successors(grid, node, 0.0, goal, block, params, **kw)}


def test_successors_open_interior_emits_all_eight():
    g = GridMap.empty(9, 9)
    # brute-force oracle: every unit ray from the center is free
    expected = {cells[-1] for cells in
                (ray_cells((4, 4), u, 1) for u in
                 ((1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)))}
    assert _successor_cells(g, (4, 4), (8, 8), 1) == expected
    assert len(expected) == 8


def test_successors_wall_blocks_rightward_rays():
    # wall spans the column immediately right of the node
    g = GridMap.from_rows(["..#..",
                           "..#..",
                           "..#..",
                           "..#..",
                           "..#.."])
    cells = _successor_cells(g, (1, 2), (4, 2), 2)
    assert all(c[0] <= 1 for c in cells)  # nothing reaches past the wall
    assert (3, 2) not in cells and (3, 0) not in cells and (3, 4) not in cells


def test_successors_goal_short_step():
    g = GridMap.empty(10, 10)
    cells = _successor_cells(g, (2, 5), (4, 5), 3)
    assert (4, 5) in cells          # the goal, two cells away on a free ray
    assert (5, 5) not in cells      # the ray stops at the goal


def test_successors_never_cross_obstacles():
    rng = np.random.default_rng(3)
    for _ in range(200):
        g = GridMap(rng.random((12, 12)) < 0.35)
        free = [(x, y) for y in range(12) for x in range(12) if g.is_free((x, y))]
        if len(free) < 2:
            continue
        node = free[int(rng.integers(0, len(free)))]
        goal = free[int(rng.integers(0, len(free)))]
        n = int(rng.integers(1, 6))
        for s in successors(g, node, 0.0, goal, build_motion_block(n),
                            AdaptiveCostParams()):
            dx = s.cell[0] - node[0]
            dy = s.cell[1] - node[1]
            unit = ((dx > 0) - (dx < 0), (dy > 0) - (dy < 0))
            for cell in ray_cells(node, unit, max(abs(dx), abs(dy))):
                assert g.is_free(cell)


def test_successors_n1_equals_free_neighborhood():
    g = GridMap.from_rows(["#..",
                           ".#.",
                           "..."])
    free_nbrs = {(x, y) for x in range(3) for y in range(3)
                 if g.is_free((x, y)) and (x, y) != (0, 1)
                 and max(abs(x - 0), abs(y - 1)) == 1}
    assert _successor_cells(g, (0, 1), (2, 2), 1) == free_nbrs


def test_successors_arrival_cost_is_adaptive_cost():
    g = GridMap.empty(12, 12)
    goal = (11, 11)
    for s in successors(g, (4, 4), 2.5, goal, build_motion_block(3),
                        AdaptiveCostParams()):
        assert s.arrival_cost == pytest.approx(
            adaptive_cost(2.5, (4, 4), s.cell, goal, 0.007), abs=1e-9)


def test_successors_direction_weighted_multiplies_diagonals():
    g = GridMap.empty(12, 12)
    goal = (11, 11)
    plain = {s.cell: s.arrival_cost
             for s in successors(g, (5, 5), 1.0, goal, build_motion_block(2),
                                 AdaptiveCostParams())}
    weighted = {s.cell: (s.arrival_cost, s.via.direction_class)
                for s in successors(g, (5, 5), 1.0, goal, build_motion_block(2),
                                    AdaptiveCostParams(), direction_weighted=True)}
    for cell, (cost, klass) in weighted.items():
        factor = SQRT2 if klass is DirectionClass.DIAGONAL else 1.0
        assert cost == pytest.approx(plain[cell] * factor, abs=1e-9)


def test_successors_truncated_steps_flag():
    # wall two cells to the right: blocked ray emits nothing by default,
    # the ablation flag emits the last free cell before the wall
    g = GridMap.from_rows(["...#...."])
    base = _successor_cells(g, (1, 0), (7, 0), 3)
    assert (2, 0) not in base
    trunc = _successor_cells(g, (1, 0), (7, 0), 3, emit_truncated_steps=True)
    assert (2, 0) in trunc


def test_successors_inspected_tracks_ray_cells():
    g = GridMap.from_rows(["....",
                           "....",
                           "...."])
    inspected = set()
    successors(g, (0, 0), 0.0, (3, 2), build_motion_block(2),
               AdaptiveCostParams(), inspected=inspected)
    assert (1, 0) in inspected and (2, 0) in inspected
    assert (1, 1) in inspected and (2, 2) in inspected
    assert all(g.in_bounds(c) for c in inspected)


def test_successors_rejects_bad_origin():
    g = GridMap.from_rows(["#."])
    with pytest.raises(ValueError):
        successors(g, (0, 0), 0.0, (1, 0), build_motion_block(1),
                   AdaptiveCostParams())
    with pytest.raises(ValueError):
        successors(g, (5, 5), 0.0, (1, 0), build_motion_block(1),
                   AdaptiveCostParams())

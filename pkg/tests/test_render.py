from pathlib import Path

import pytest

from rmbplan import (GridMap, Scenario, SearchStatus, load_prepared_map,
                     rmb_astar)
from rmbplan.render import render_svg

GOLDEN = Path(__file__).parent / "data" / "golden_5x5.svg"


def _demo():
    grid = GridMap.from_rows([".....",
                              ".##..",
                              ".....",
                              "..#..",
                              "....."])
    scenario = Scenario((0, 0), (4, 4))
    return grid, scenario, rmb_astar(grid, scenario, 1)


def test_golden_render_byte_exact():
    grid, scenario, result = _demo()
    assert render_svg(grid, result, scenario) == GOLDEN.read_text()


def test_render_is_deterministic():
    grid, scenario, result = _demo()
    assert render_svg(grid, result, scenario) == render_svg(grid, result, scenario)


def test_render_not_found_has_markers_but_no_path():
    grid = GridMap.from_rows(["..#..",
                              "..#..",
                              "..#..",
                              "..#..",
                              "..#.."])
    scenario = Scenario((0, 2), (4, 2))
    result = rmb_astar(grid, scenario, 1)
    assert result.status is SearchStatus.NOT_FOUND
    svg = render_svg(grid, result, scenario)
    assert "polyline" not in svg
    assert 'stroke="cyan"' in svg
    assert 'fill="green"' in svg and 'fill="blue"' in svg


def test_render_map_only():
    grid = GridMap.from_rows(["#.", ".."])
    svg = render_svg(grid)
    assert svg.startswith("<svg ")
    assert 'fill="black"' in svg
    assert "circle" not in svg


def test_render_rejects_result_from_other_map():
    grid, scenario, result = _demo()
    small = GridMap.empty(2, 2)
    with pytest.raises(ValueError):
        render_svg(small, result, scenario)


def test_render_prepared_map_shows_border_frame(cache_dir, cache_manifest):
    entry = next(e for e in cache_manifest["entries"]
                 if e["dimension_class"] == "261x261")
    grid = load_prepared_map(cache_dir / entry["path"])
    svg = render_svg(grid)
    # the outer obstacle ring renders as full-width rows at the top and bottom
    assert '<rect x="0" y="0" width="261" height="1" fill="black"/>' in svg
    assert '<rect x="0" y="260" width="261" height="1" fill="black"/>' in svg

"""Shared fixtures: a synthetic benchmark dataset and its prepared map cache.

The five tile generators mimic the structure of the benchmark map families
(wall fields with gaps, scattered forests, dead-end traps, mixes, mazes) on
201x201 tiles. Obstacle layouts are deterministic per (map type, tile index),
so every test session sees byte-identical maps.
"""

import numpy as np
import pytest

from rmbplan import MAP_TYPES, prepare_cache

TILE = 201


def _scatter(a, rng, density, lo, hi):
    """Sprinkle random rectangles until the obstacle fraction reaches density."""
    target = density * a.size
    filled = 0
    while filled < target:
        x = int(rng.integers(0, a.shape[1] - lo))
        y = int(rng.integers(0, a.shape[0] - lo))
        w = int(rng.integers(lo, hi))
        h = int(rng.integers(lo, hi))
        patch = a[y:y + h, x:x + w]
        filled += (patch > 0).sum()
        patch[:] = 0


def _diag_thicket(a, rng, x, y, s, flip):
    """Dense block of 2-wide plugged diagonal lanes behind a sealed border.

    Single-step search can weave through the lanes, but no three free cells
    are ever colinear inside, so the block is a dead end for longer jumps.
    """
    x1, y1 = min(x + s, a.shape[1]), min(y + s, a.shape[0])
    sub = a[y:y1, x:x1]
    h, w = sub.shape
    if h < 15 or w < 15:
        return
    yy, xx = np.mgrid[0:h, 0:w]
    u = (xx - yy) if not flip else (xx + yy)   # across lanes
    v = (xx + yy) if not flip else (xx - yy)   # along lanes
    free = (u % 3 != 2)
    free &= ~((u % 3 == 0) & (v % 6 == 0))
    free &= ~((u % 3 == 1) & (v % 6 == 3))
    sub[:] = np.where(free, 255, 0).astype(np.uint8)
    sub[0, :] = 0
    sub[-1, :] = 0
    sub[:, 0] = 0
    sub[:, -1] = 0
    for _ in range(3):
        side = int(rng.integers(0, 4))
        p = int(rng.integers(2, (w if side < 2 else h) - 8))
        if side == 0:
            sub[0, p:p + 5] = 255
        elif side == 1:
            sub[-1, p:p + 5] = 255
        elif side == 2:
            sub[p:p + 5, 0] = 255
        else:
            sub[p:p + 5, -1] = 255


def alternating_gaps_tile(rng):
    a = np.full((TILE, TILE), 255, np.uint8)
    for x0 in range(10, TILE - 6, 10):
        a[:, x0:x0 + 2] = 0
        for gy in rng.integers(3, TILE - 17, 2):
            a[gy:gy + 12, x0:x0 + 2] = 255
    return a


def forest_tile(rng):
    a = np.full((TILE, TILE), 255, np.uint8)
    _scatter(a, rng, 0.035, 3, 7)
    for _ in range(4):
        s = int(rng.integers(45, 70))
        x = int(rng.integers(0, TILE - s))
        y = int(rng.integers(0, TILE - s))
        _diag_thicket(a, rng, x, y, s, bool(rng.integers(0, 2)))
    return a


def bugtrap_forest_tile(rng):
    a = np.full((TILE, TILE), 255, np.uint8)
    _scatter(a, rng, 0.025, 3, 7)
    for _ in range(4):
        s = int(rng.integers(60, 90))
        x = int(rng.integers(0, TILE - s))
        y = int(rng.integers(0, TILE - s))
        _diag_thicket(a, rng, x, y, s, bool(rng.integers(0, 2)))
    return a


def gaps_and_forest_tile(rng):
    a = np.full((TILE, TILE), 255, np.uint8)
    for x0 in range(24, TILE - 11, 28):
        a[:, x0:x0 + 2] = 0
        for gy in rng.integers(3, TILE - 15, 2):
            a[gy:gy + 11, x0:x0 + 2] = 255
    for _ in range(3):
        s = int(rng.integers(45, 65))
        x = int(rng.integers(0, TILE - s))
        y = int(rng.integers(0, TILE - s))
        _diag_thicket(a, rng, x, y, s, bool(rng.integers(0, 2)))
    _scatter(a, rng, 0.02, 3, 6)
    return a


def mazes_tile(rng, pitch=28, wall=4):
    cells = (TILE - wall) // pitch
    a = np.full((TILE, TILE), 255, np.uint8)
    for i in range(cells + 1):
        p = i * pitch
        a[p:p + wall, :] = 0
        a[:, p:p + wall] = 0
    a[cells * pitch:, :] = 0
    a[:, cells * pitch:] = 0
    # depth-first spanning tree over the cell lattice; knock connecting walls
    visited = {(0, 0)}
    stack = [(0, 0)]
    while stack:
        cx, cy = stack[-1]
        nbrs = [(cx + dx, cy + dy) for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))
                if 0 <= cx + dx < cells and 0 <= cy + dy < cells
                and (cx + dx, cy + dy) not in visited]
        if not nbrs:
            stack.pop()
            continue
        nx, ny = nbrs[rng.integers(0, len(nbrs))]
        visited.add((nx, ny))
        stack.append((nx, ny))
        if nx != cx:
            wx = max(cx, nx) * pitch
            y0 = cy * pitch + wall
            a[y0:y0 + pitch - wall, wx:wx + wall] = 255
        else:
            wy = max(cy, ny) * pitch
            x0 = cx * pitch + wall
            a[wy:wy + wall, x0:x0 + pitch - wall] = 255
    # mouths into the surrounding space, aligned with corridors
    for side in range(4):
        for ci in rng.choice(cells, size=2, replace=False):
            lo = int(ci) * pitch + wall
            hi = lo + pitch - wall
            if side == 0:
                a[0:wall, lo:hi] = 255
            elif side == 1:
                a[cells * pitch:, lo:hi] = 255
            elif side == 2:
                a[lo:hi, 0:wall] = 255
            else:
                a[lo:hi, cells * pitch:] = 255
    return a


TILE_GENERATORS = {
    "alternating_gaps": alternating_gaps_tile,
    "forest": forest_tile,
    "bugtrap_forest": bugtrap_forest_tile,
    "gaps_and_forest": gaps_and_forest_tile,
    "mazes": mazes_tile,
}


def make_tile(map_type: str, index: int) -> np.ndarray:
    """Deterministic tile for (map type, index)."""
    type_idx = MAP_TYPES.index(map_type)
    rng = np.random.default_rng([97, type_idx, index])
    return TILE_GENERATORS[map_type](rng)


def write_dataset(root, per_type: int = 24, map_types=MAP_TYPES) -> None:
    """Write a PNG dataset tree: <root>/<map_type>/train/<index>.png."""
    from PIL import Image

    for map_type in map_types:
        tdir = root / map_type / "train"
        tdir.mkdir(parents=True, exist_ok=True)
        for i in range(per_type):
            Image.fromarray(make_tile(map_type, i), mode="L").save(
                tdir / f"{i:03d}.png")


@pytest.fixture(scope="session")
def dataset_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("dataset")
    write_dataset(root)
    return root


@pytest.fixture(scope="session")
def cache_dir(dataset_root, tmp_path_factory):
    """Prepared cache with 20 tiles per type: 20 / 10 / 5 maps per dimension."""
    out = tmp_path_factory.mktemp("cache")
    prepare_cache(dataset_root, out, cap=20)
    return out / "prepared"


@pytest.fixture(scope="session")
def cache_manifest(cache_dir):
    import json

    return json.loads((cache_dir / "manifest.json").read_text())

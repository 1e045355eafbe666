"""Dataset ingestion: bitmap decoding, stitching, borders, scenarios, inventory.

The benchmark maps arrive as 201x201 black/white PNG tiles grouped in one
directory per map type. Preparation stitches tiles into three dimension
classes, wraps them in a 15-cell obstacle border plus a 15-cell free ring,
and caches the result as binary PGM for bit-exact reuse.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import Coord, GridMap

log = logging.getLogger(__name__)

MAP_TYPES = ("alternating_gaps", "forest", "bugtrap_forest",
             "gaps_and_forest", "mazes")
DIMENSION_CLASSES = ("261x261", "462x261", "462x462")

FREE_THRESHOLD = 128   # luminance >= threshold reads as a free cell
BORDER_CELLS = 15      # width of each of the two added rings
SCENARIO_INSET = 20    # endpoint distance from the map edge, inside the free ring

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class RawBitmap:
    """8-bit grayscale bitmap, row-major, as decoded from a dataset image."""

    __slots__ = ("luminance", "width", "height")

    def __init__(self, luminance):
        arr = np.array(luminance, dtype=np.uint8)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("bitmap must be a non-empty 2-D luminance array")
        self.luminance = arr
        self.height, self.width = arr.shape

    def __eq__(self, other):
        return (isinstance(other, RawBitmap)
                and np.array_equal(self.luminance, other.luminance))

    def __repr__(self):
        return f"RawBitmap({self.width}x{self.height})"


def load_png(path: str | Path) -> RawBitmap:
    """Decode a PNG to luminance; RGB collapses by integer mean (r+g+b)/3."""
    from PIL import Image

    with Image.open(path) as img:
        if img.mode == "L":
            arr = np.asarray(img, dtype=np.uint8)
        else:
            rgb = np.asarray(img.convert("RGB"), dtype=np.uint16)
            arr = ((rgb[:, :, 0] + rgb[:, :, 1] + rgb[:, :, 2]) // 3).astype(np.uint8)
    return RawBitmap(arr)


def threshold_bitmap(raw: RawBitmap, map_type: str = "raw",
                     dimension_class: str = "raw", source_id: str = "") -> GridMap:
    """Binarize: luminance >= 128 is free, below is obstacle."""
    return GridMap(raw.luminance < FREE_THRESHOLD, map_type=map_type,
                   dimension_class=dimension_class, source_id=source_id)


def stitch(tiles: list[RawBitmap], layout: str) -> RawBitmap:
    """Concatenate equally sized tiles: '1x1' identity, '2x1' side by side,
    '2x2' square (left-to-right, top-to-bottom)."""
    counts = {"1x1": 1, "2x1": 2, "2x2": 4}
    if layout not in counts:
        raise ValueError(f"unknown layout {layout!r}; expected one of {sorted(counts)}")
    if len(tiles) != counts[layout]:
        raise ValueError(f"layout {layout} needs {counts[layout]} tiles, got {len(tiles)}")
    shape = tiles[0].luminance.shape
    for t in tiles[1:]:
        if t.luminance.shape != shape:
            raise ValueError(f"tile dimensions differ: {t.luminance.shape} vs {shape}")
    if layout == "1x1":
        return RawBitmap(tiles[0].luminance)
    if layout == "2x1":
        return RawBitmap(np.hstack([tiles[0].luminance, tiles[1].luminance]))
    top = np.hstack([tiles[0].luminance, tiles[1].luminance])
    bottom = np.hstack([tiles[2].luminance, tiles[3].luminance])
    return RawBitmap(np.vstack([top, bottom]))


def add_borders(raw: RawBitmap) -> RawBitmap:
    """Wrap the bitmap in a 15-cell free ring inside a 15-cell obstacle ring.

    Output grows by 60 cells per axis. The obstacle ring keeps searches on the
    map; the free ring guarantees free cells for scenario endpoints.
    """
    b = BORDER_CELLS
    h, w = raw.luminance.shape
    out = np.zeros((h + 4 * b, w + 4 * b), dtype=np.uint8)
    out[b:-b, b:-b] = 255
    out[2 * b:-2 * b, 2 * b:-2 * b] = raw.luminance
    return RawBitmap(out)


def write_pgm(path: str | Path, raw: RawBitmap) -> None:
    """Binary PGM (P5, maxval 255); header and payload are byte-deterministic."""
    header = f"P5\n{raw.width} {raw.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + raw.luminance.tobytes())


def read_pgm(path: str | Path) -> RawBitmap:
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    # header = magic, width, height, maxval as whitespace-separated tokens
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":  # comment line
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while end < len(data) and not data[end:end + 1].isspace():
            end += 1
        fields.append(int(data[pos:end]))
        pos = end
    pos += 1  # single whitespace after maxval
    width, height, maxval = fields
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    pixels = np.frombuffer(data[pos:pos + width * height], dtype=np.uint8)
    if pixels.size != width * height:
        raise ValueError(f"{path}: truncated pixel data")
    return RawBitmap(pixels.reshape(height, width))


def load_prepared_map(path: str | Path, map_type: str = "raw",
                      dimension_class: str = "raw", source_id: str = "") -> GridMap:
    """Read a cached PGM back into a GridMap."""
    return threshold_bitmap(read_pgm(path), map_type=map_type,
                            dimension_class=dimension_class, source_id=source_id)


@dataclass(frozen=True)
class Scenario:
    """One start/goal pair; direction_id numbers the four benchmark directions."""
    start: Coord
    goal: Coord
    direction_id: int = 0


def dimension_size(dimension_class: str) -> tuple[int, int]:
    try:
        w, h = dimension_class.split("x")
        return int(w), int(h)
    except ValueError:
        raise ValueError(f"bad dimension class {dimension_class!r}, expected 'WxH'") from None


def default_scenarios(width: int, height: int) -> list[Scenario]:
    """Four opposite-corner pairs inset 20 cells from the edge.

    The inset places every endpoint inside the guaranteed-free inner ring of a
    prepared map, so the defaults are valid on any map of the class.
    """
    lo = SCENARIO_INSET
    hx, hy = width - 1 - SCENARIO_INSET, height - 1 - SCENARIO_INSET
    return [
        Scenario(start=(lo, lo), goal=(hx, hy), direction_id=1),
        Scenario(start=(hx, lo), goal=(lo, hy), direction_id=2),
        Scenario(start=(lo, hy), goal=(hx, lo), direction_id=3),
        Scenario(start=(hx, hy), goal=(lo, lo), direction_id=4),
    ]


def generate_scenarios(dimension_class: str,
                       overrides: dict | None = None) -> list[Scenario]:
    """The four benchmark scenarios for a dimension class, with optional
    per-(class, direction) overrides from load_scenario_overrides()."""
    if dimension_class not in DIMENSION_CLASSES:
        raise ValueError(f"unknown dimension class {dimension_class!r}; "
                         f"expected one of {DIMENSION_CLASSES}")
    width, height = dimension_size(dimension_class)
    scenarios = default_scenarios(width, height)
    if overrides:
        scenarios = [
            overrides.get((dimension_class, s.direction_id), s) for s in scenarios
        ]
    return scenarios


def load_scenario_overrides(path: str | Path) -> dict[tuple[str, int], Scenario]:
    """Parse a scenario override file: a JSON array of
    {dimension_class, direction_id, start: [x, y], goal: [x, y]}."""
    entries = json.loads(Path(path).read_text())
    if not isinstance(entries, list):
        raise ValueError(f"{path}: override file must contain a JSON array")
    out = {}
    for e in entries:
        dim = e["dimension_class"]
        direction = int(e["direction_id"])
        start = (int(e["start"][0]), int(e["start"][1]))
        goal = (int(e["goal"][0]), int(e["goal"][1]))
        if start == goal:
            raise ValueError(f"{path}: start equals goal for {dim} direction {direction}")
        out[(dim, direction)] = Scenario(start=start, goal=goal, direction_id=direction)
    return out


@dataclass(frozen=True)
class DatasetEntry:
    map_type: str
    source_id: str
    path: Path


@dataclass
class DatasetInventory:
    entries: list[DatasetEntry]
    counts: dict[str, int]
    skipped: int = 0

    def by_type(self, map_type: str) -> list[DatasetEntry]:
        return [e for e in self.entries if e.map_type == map_type]


def load_dataset(root: str | Path, map_type: str | None = None,
                 cap: int | None = None) -> DatasetInventory:
    """Walk `<root>/<map_type>/**/*.png` for the five supported map types.

    Files are ordered lexicographically within each type and optionally capped
    per type. Files that are not readable PNGs are skipped with a warning and
    counted in `skipped`.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset root {root} does not exist")
    types = (map_type,) if map_type else MAP_TYPES
    if map_type and map_type not in MAP_TYPES:
        raise ValueError(f"unknown map type {map_type!r}; expected one of {MAP_TYPES}")
    entries: list[DatasetEntry] = []
    counts: dict[str, int] = {}
    skipped = 0
    for t in types:
        tdir = root / t
        if not tdir.is_dir():
            counts[t] = 0
            continue
        kept = []
        for p in sorted(tdir.rglob("*.png"), key=lambda p: p.as_posix()):
            try:
                with open(p, "rb") as fh:
                    magic = fh.read(len(_PNG_MAGIC))
            except OSError as exc:
                log.warning("skipping unreadable file %s: %s", p, exc)
                skipped += 1
                continue
            if magic != _PNG_MAGIC:
                log.warning("skipping non-PNG file %s", p)
                skipped += 1
                continue
            source_id = p.relative_to(tdir).as_posix()[:-len(".png")].replace("/", "_")
            kept.append(DatasetEntry(map_type=t, source_id=source_id, path=p))
            if cap is not None and len(kept) >= cap:
                break
        counts[t] = len(kept)
        entries.extend(kept)
    return DatasetInventory(entries=entries, counts=counts, skipped=skipped)

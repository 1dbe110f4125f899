"""Canonical level-``m`` partitions of a rasterized carpet.

Every kept level-``m`` cell becomes one tile; its members are the depth-``k``
cells sharing that ``m``-digit prefix.  Because rasterization emits cells in
lexicographic digit order, each tile owns a contiguous block of
``|mask|**(k-m)`` cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .ifs_core import CellAddress, DigitalFractal

AMBIENT = "ambient-center"
INTRINSIC = "intrinsic"
MODES = (AMBIENT, INTRINSIC)


@dataclass(frozen=True)
class TileMetrics:
    center: tuple[Fraction, Fraction]
    r_min: float
    r_max: float
    mode: str
    ratio: float

    def to_dict(self) -> dict:
        return {
            "center": [float(self.center[0]), float(self.center[1])],
            "r_min": self.r_min,
            "r_max": self.r_max,
            "mode": self.mode,
            "ratio": self.ratio,
        }


@dataclass(frozen=True)
class Tile:
    index: int
    address: CellAddress
    start: int
    stop: int
    metrics: TileMetrics | None = None

    @property
    def id(self) -> tuple[int, int]:
        return (self.address.x, self.address.y)

    @property
    def member_slice(self) -> slice:
        return slice(self.start, self.stop)


@dataclass(frozen=True, eq=False)
class Tiling:
    fractal: DigitalFractal
    tile_level: int
    tiles: tuple[Tile, ...]
    mode: str = AMBIENT

    @property
    def base(self) -> int:
        return self.fractal.spec.base

    @property
    def depth(self) -> int:
        return self.fractal.depth

    @property
    def cells_per_side(self) -> int:
        """Depth-``k`` cells along one side of a tile, ``b**(k-m)``."""
        return self.base ** (self.depth - self.tile_level)

    @property
    def tile_side(self) -> Fraction:
        return Fraction(1, self.base**self.tile_level)

    @cached_property
    def tile_grid(self) -> np.ndarray:
        """``(b**m, b**m)`` array ``[ty, tx] -> tile index`` (-1 where absent)."""
        n = self.base**self.tile_level
        grid = np.full((n, n), -1, dtype=np.int64)
        for t in self.tiles:
            grid[t.address.y, t.address.x] = t.index
        return grid

    def member_cells(self, tile: Tile) -> np.ndarray:
        return self.fractal.cells[tile.member_slice]

    def tile_of_cells(self, x, y) -> np.ndarray:
        """Tile index of each depth-``k`` cell, -1 for cells outside F."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        inside = self.fractal.contains(x, y)
        q = self.cells_per_side
        out = np.full(x.shape, -1, dtype=np.int64)
        out[inside] = self.tile_grid[y[inside] // q, x[inside] // q]
        return out

    @cached_property
    def r_min(self) -> float:
        """Uniform inner radius: the smallest per-tile ``r_min``."""
        return min(t.metrics.r_min for t in self.tiles)

    @cached_property
    def r_max(self) -> float:
        return max(t.metrics.r_max for t in self.tiles)

    @cached_property
    def ratio(self) -> float:
        """Worst per-tile ``r_max / r_min``.

        In ambient-center mode every tile has the closed-form ratio sqrt(2).
        """
        return max(t.metrics.ratio for t in self.tiles)

    @cached_property
    def tiles_connected(self) -> bool:
        """Whether each tile's member cells form one connected closed set.

        All tiles are translates of the same depth-``(k-m)`` pattern, so one
        check covers the whole tiling.  Closed squares sharing only a corner
        count as connected.
        """
        local = _local_pattern(self)
        q = self.cells_per_side
        img = np.zeros((q, q), dtype=bool)
        img[local[:, 1], local[:, 0]] = True
        _, n = ndimage.label(img, structure=np.ones((3, 3), dtype=int))
        return n == 1


def canonical_partition(fractal: DigitalFractal, m: int,
                        mode: str = AMBIENT) -> Tiling:
    k = fractal.depth
    if not 0 <= m <= k:
        raise ValueError(f"tile level m={m} must satisfy 0 <= m <= k={k}")
    if mode not in MODES:
        raise ValueError(f"unknown radius mode {mode!r}; use one of {MODES}")
    b = fractal.spec.base
    q = b ** (k - m)
    per_tile = fractal.spec.n_maps ** (k - m)
    n_tiles = len(fractal) // per_tile
    starts = np.arange(n_tiles) * per_tile
    txs = fractal.xs[starts] // q
    tys = fractal.ys[starts] // q
    bare = tuple(
        Tile(i, CellAddress.from_xy(int(txs[i]), int(tys[i]), m, b),
             int(starts[i]), int(starts[i]) + per_tile)
        for i in range(n_tiles)
    )
    skeleton = Tiling(fractal, m, bare, mode)
    if mode == AMBIENT:
        tiles = tuple(_with_metrics(t, _ambient_metrics(skeleton, t)) for t in bare)
    else:
        solver = _IntrinsicSolver(skeleton)
        tiles = tuple(_with_metrics(t, solver.metrics(t)) for t in bare)
    return Tiling(fractal, m, tiles, mode)


def _with_metrics(tile: Tile, metrics: TileMetrics) -> Tile:
    return Tile(tile.index, tile.address, tile.start, tile.stop, metrics)


def tile_metrics(tiling: Tiling, tile: Tile, mode: str = AMBIENT) -> TileMetrics:
    """Inner/outer radii and center for one tile.

    ``ambient-center`` uses the geometric center of the tile square (half
    side, half diagonal).  ``intrinsic`` restricts the center to depth-``k``
    member cell centers and maximizes the distance to the nearest fractal
    cell of any other tile.
    """
    own = tiling.tiles[tile.index] if 0 <= tile.index < len(tiling.tiles) else None
    if own is None or own.address != tile.address:
        raise ValueError("tile does not belong to this tiling")
    if mode == AMBIENT:
        return _ambient_metrics(tiling, tile)
    if mode == INTRINSIC:
        return _IntrinsicSolver(tiling).metrics(tile)
    raise ValueError(f"unknown radius mode {mode!r}")


def _ambient_metrics(tiling: Tiling, tile: Tile) -> TileMetrics:
    s = tiling.tile_side
    center = ((tile.address.x + Fraction(1, 2)) * s,
              (tile.address.y + Fraction(1, 2)) * s)
    r_min = float(s / 2)
    return TileMetrics(center, r_min, r_min * math.sqrt(2), AMBIENT, math.sqrt(2))


def _local_pattern(tiling: Tiling) -> np.ndarray:
    """Member cells of tile 0 relative to its lower-left corner."""
    t = tiling.tiles[0]
    q = tiling.cells_per_side
    cells = tiling.member_cells(t)
    return cells - np.array([t.address.x * q, t.address.y * q])


class _IntrinsicSolver:
    """Exhaustive best-center search, cached per 5x5 neighbourhood pattern.

    Works in half-cell units so that every squared distance is an integer:
    cell ``(u, v)`` has center ``(2u+1, 2v+1)`` and box ``[2u, 2u+2]^2``.
    Cells more than two tiles away are at least ``2s > sqrt(2) s >= r_max``
    from any point of the tile, and ``r_min`` is capped at ``r_max``, so the
    5x5 block of tiles decides the answer.
    """

    def __init__(self, tiling: Tiling):
        self.tiling = tiling
        self.q = tiling.cells_per_side
        self.local = _local_pattern(tiling)
        self.cand = 2 * self.local + 1
        corners = np.concatenate([
            2 * self.local + off for off in ([0, 0], [2, 0], [0, 2], [2, 2])
        ])
        self.corners = _hull_points(np.unique(corners, axis=0))
        self.cache: dict[tuple, tuple[int, int, int]] = {}

    def _neighbours(self, tile: Tile) -> tuple:
        grid = self.tiling.tile_grid
        n = grid.shape[0]
        key = []
        for dy in range(-2, 3):
            for dx in range(-2, 3):
                if dx == 0 and dy == 0:
                    continue
                tx, ty = tile.address.x + dx, tile.address.y + dy
                key.append(bool(0 <= tx < n and 0 <= ty < n and grid[ty, tx] >= 0))
        return tuple(key)

    def _solve(self, key: tuple) -> tuple[int, int, int]:
        offsets = [(dx, dy) for dy in range(-2, 3) for dx in range(-2, 3)
                   if not (dx == 0 and dy == 0)]
        outside = [self.local + np.array([dx * self.q, dy * self.q])
                   for (dx, dy), present in zip(offsets, key) if present]
        # squared distance to the farthest member-cell corner
        diff = self.cand[:, None, :] - self.corners[None, :, :]
        rmax2 = (diff**2).sum(axis=2).max(axis=1)
        if outside:
            rmin2 = _box_distance2(self.cand, np.concatenate(outside))
            eff = np.minimum(rmin2, rmax2)
        else:
            eff = rmax2.copy()
        best = eff.max()
        tied = np.flatnonzero(eff == best)
        pick = tied[np.argmin(rmax2[tied])]  # first minimum keeps canonical order
        return int(pick), int(eff[pick]), int(rmax2[pick])

    def metrics(self, tile: Tile) -> TileMetrics:
        key = self._neighbours(tile)
        if key not in self.cache:
            self.cache[key] = self._solve(key)
        pick, rmin2, rmax2 = self.cache[key]
        unit = 2 * self.tiling.fractal.grid_size  # half-units per unit length
        u, v = self.local[pick]
        ox, oy = tile.address.x * self.q, tile.address.y * self.q
        center = (Fraction(2 * (ox + int(u)) + 1, unit),
                  Fraction(2 * (oy + int(v)) + 1, unit))
        r_min = math.sqrt(rmin2) / unit
        r_max = math.sqrt(rmax2) / unit
        return TileMetrics(center, r_min, r_max, INTRINSIC, math.sqrt(rmax2 / rmin2))


def _box_distance2(cand: np.ndarray, cells: np.ndarray) -> np.ndarray:
    """Squared half-unit distance from each candidate center to the nearest
    cell box in ``cells`` (integer cell coordinates)."""
    centers = 2 * cells + 1
    tree = cKDTree(centers)
    d0, _ = tree.query(cand)
    # box distance >= center distance - sqrt(2), so the nearest box has its
    # center within d0 + sqrt(2)
    out = np.empty(len(cand), dtype=np.int64)
    hits = tree.query_ball_point(cand, d0 + math.sqrt(2) + 1e-9)
    for i, idx in enumerate(hits):
        d = np.abs(centers[idx] - cand[i])
        d = np.maximum(d - 1, 0)
        out[i] = (d**2).sum(axis=1).min()
    return out


def _hull_points(points: np.ndarray) -> np.ndarray:
    from scipy.spatial import ConvexHull, QhullError

    if len(points) < 4:
        return points
    try:
        return points[ConvexHull(points).vertices]
    except QhullError:
        return points


@dataclass
class GRPReport:
    ratio: float
    r_min: float
    r_max: float
    mode: str
    c: float
    d_sep_estimate: object | None
    regularity: object | None
    substantiality: list[dict] = field(default_factory=list)
    point_contacts: list[dict] = field(default_factory=list)
    tiles_connected: bool = True
    regularity_note: str = ""
    strict_contacts: bool = False
    condition_i: bool = False
    condition_ii: bool = False
    condition_iii: bool = False
    condition_iii_literal: bool = False

    @property
    def overall(self) -> bool:
        return self.condition_i and self.condition_ii and self.condition_iii

    def to_dict(self) -> dict:
        return {
            "ratio": self.ratio,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "mode": self.mode,
            "c": self.c,
            "d_sep_estimate": None if self.d_sep_estimate is None
            else self.d_sep_estimate.to_dict(),
            "regularity": None if self.regularity is None
            else self.regularity.to_dict(),
            "regularity_note": self.regularity_note,
            "tiles_connected": self.tiles_connected,
            "condition_i": self.condition_i,
            "condition_ii": self.condition_ii,
            "condition_iii": self.condition_iii,
            "condition_iii_literal": self.condition_iii_literal,
            "strict_contacts": self.strict_contacts,
            "substantiality": self.substantiality,
            "point_contacts": self.point_contacts,
            "overall": self.overall,
        }


def grp_check(tiling: Tiling, c: float = 0.5, *, tolerance: float = 50.0,
              n_samples: int = 64, n_radii: int = 6, seed: int = 42,
              substantiality_mode: str = "subspace-ball",
              strict_contacts: bool = False, sep=None) -> GRPReport:
    """Check the three geometric-regularity conditions on a tiling.

    Condition (iii) is judged on every pair of tiles whose closures share a
    segment.  Pairs touching only at isolated points are listed in
    ``point_contacts``; they enter the verdict only with
    ``strict_contacts=True``.  ``condition_iii_literal`` always records the
    all-touching-pairs reading.
    """
    from .exceptions import ChromaticTilingError
    from .graph import interface, interface_substantial
    from .separation import (ahlfors_regularity_probe, box_counting_dimension,
                             separation_set)

    if sep is None:
        sep = separation_set(tiling)

    cond_i = 0 < tiling.r_min <= tiling.r_max

    d_est = None
    regularity = None
    note = ""
    if sep.is_empty:
        cond_ii = True
        note = "empty separation set; regularity holds vacuously"
    else:
        try:
            d_est = box_counting_dimension(sep)
            regularity = ahlfors_regularity_probe(
                sep, d_est.slope, n_samples=n_samples, n_radii=n_radii,
                radius_range=default_probe_range(tiling, sep),
                seed=seed, tolerance=tolerance,
            )
            cond_ii = regularity.passed
        except ChromaticTilingError as exc:
            cond_ii = False
            note = f"regularity probe failed: {exc}"

    rows = []
    contacts = []
    for (i, j) in sep.touching_pairs():
        iface = interface(tiling, sep, i, j)
        ok = interface_substantial(iface, tiling.r_min, c, sep,
                                   mode=substantiality_mode)
        row = {
            "tiles": [list(tiling.tiles[i].id), list(tiling.tiles[j].id)],
            "n_segments": int(len(iface.segments)),
            "n_points": int(len(iface.points)),
            "diameter": iface.diameter,
            "substantial": bool(ok),
        }
        if len(iface.segments):
            rows.append(row)
        else:
            contacts.append(row)
    cond_iii_seg = all(r["substantial"] for r in rows)
    literal = cond_iii_seg and all(r["substantial"] for r in contacts)

    return GRPReport(
        ratio=tiling.ratio, r_min=tiling.r_min, r_max=tiling.r_max,
        mode=tiling.mode, c=c, d_sep_estimate=d_est, regularity=regularity,
        substantiality=rows, point_contacts=contacts,
        tiles_connected=tiling.tiles_connected, regularity_note=note,
        strict_contacts=strict_contacts, condition_i=cond_i,
        condition_ii=cond_ii,
        condition_iii=literal if strict_contacts else cond_iii_seg,
        condition_iii_literal=literal,
    )


def default_probe_range(tiling: Tiling, sep) -> tuple[float, float]:
    """Radii from ``b**-(k-2)`` up to the tile side (or half the set's
    diameter when that is smaller)."""
    b, k, m = tiling.base, tiling.depth, tiling.tile_level
    lo = float(b) ** -(k - 2)
    hi = min(float(b) ** -m, sep.diameter() / 2)
    return lo, max(lo, hi)

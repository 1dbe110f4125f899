"""Separation sets of canonical tilings, box counting and Ahlfors probes.

All geometry is in depth-``k`` integer grid units.  A separation *segment*
is a unit grid edge on an interior level-``m`` grid line whose two flanking
depth-``k`` cells are both in F (they then lie in distinct tiles, and the
edge sits in both closures).  A separation *point* is a grid vertex on such
a line where two tiles touch only at that vertex.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import (EmptySetError, InsufficientScalesError,
                         InvalidDimensionError, InvalidRadiusRangeError)
from .ifs_core import DigitalFractal
from .partition import Tiling

VERTICAL = 0
HORIZONTAL = 1


@dataclass(frozen=True, eq=False)
class SeparationSet:
    """Segments and contact points of a tiling at raster resolution.

    ``seg_xy[i]`` is the start vertex of segment ``i``; it runs to
    ``seg_xy[i] + (0, 1)`` when ``seg_dir[i] == VERTICAL`` and to
    ``seg_xy[i] + (1, 0)`` otherwise.  ``seg_tiles[i]`` is the sorted pair of
    tile indices whose closures contain it.  Vertical segments come first,
    ordered by ``(x, y)``; horizontal ones follow, ordered by ``(y, x)``.
    """

    tiling: Tiling
    seg_xy: np.ndarray
    seg_dir: np.ndarray
    seg_tiles: np.ndarray
    point_xy: np.ndarray
    point_tiles: tuple[tuple[int, ...], ...]

    @property
    def n_segments(self) -> int:
        return len(self.seg_xy)

    @property
    def n_points(self) -> int:
        return len(self.point_xy)

    @property
    def is_empty(self) -> bool:
        return self.n_segments == 0 and self.n_points == 0

    @property
    def depth(self) -> int:
        return self.tiling.depth

    @property
    def base(self) -> int:
        return self.tiling.base

    def segment_ends(self) -> np.ndarray:
        """``(n, 2, 2)`` integer endpoints."""
        return self._ends

    @cached_property
    def _ends(self) -> np.ndarray:
        step = np.where(self.seg_dir[:, None] == VERTICAL, [0, 1], [1, 0])
        ends = np.stack([self.seg_xy, self.seg_xy + step], axis=1)
        ends.setflags(write=False)
        return ends

    @cached_property
    def element_half(self) -> np.ndarray:
        """Midpoints of segments followed by points, in half-units."""
        ends = self.segment_ends()
        mids = ends.sum(axis=1)
        return np.concatenate([mids, 2 * self.point_xy]).astype(np.int64)

    @cached_property
    def element_tree(self) -> cKDTree:
        return cKDTree(self.element_half)

    @cached_property
    def pair_index(self) -> dict[tuple[int, int], tuple[np.ndarray, np.ndarray]]:
        """Tile pair -> (segment indices, point indices) in its interface."""
        segs: dict[tuple[int, int], list[int]] = {}
        for i, (a, b) in enumerate(self.seg_tiles.tolist()):
            segs.setdefault((a, b), []).append(i)
        pts: dict[tuple[int, int], list[int]] = {}
        for i, tiles in enumerate(self.point_tiles):
            for pair in combinations(tiles, 2):
                pts.setdefault(pair, []).append(i)
        out = {}
        for pair in sorted(set(segs) | set(pts)):
            out[pair] = (np.array(segs.get(pair, []), dtype=np.int64),
                         np.array(pts.get(pair, []), dtype=np.int64))
        return out

    def touching_pairs(self) -> list[tuple[int, int]]:
        return list(self.pair_index)

    def diameter(self) -> float:
        """Bounding-box diagonal of the set (unit-square coordinates)."""
        if self.is_empty:
            return 0.0
        pts = np.concatenate([self.segment_ends().reshape(-1, 2), self.point_xy])
        span = pts.max(axis=0) - pts.min(axis=0)
        return float(np.hypot(*span)) / self.tiling.fractal.grid_size

    def to_dict(self) -> dict:
        ends = self.segment_ends()
        return {
            "depth": self.depth,
            "tile_level": self.tiling.tile_level,
            "segments": [
                {"from": ends[i, 0].tolist(), "to": ends[i, 1].tolist(),
                 "tiles": self.seg_tiles[i].tolist()}
                for i in range(self.n_segments)
            ],
            "points": [
                {"at": self.point_xy[i].tolist(), "tiles": list(t)}
                for i, t in enumerate(self.point_tiles)
            ],
        }


def separation_set(tiling: Tiling) -> SeparationSet:
    b, k, m = tiling.base, tiling.depth, tiling.tile_level
    n = b**k
    q = tiling.cells_per_side
    lines = np.arange(1, b**m, dtype=np.int64) * q
    if len(lines) == 0:
        empty = np.zeros((0, 2), dtype=np.int64)
        return SeparationSet(tiling, empty, np.zeros(0, dtype=np.int8),
                             empty.copy(), empty.copy(), ())

    run = np.arange(n, dtype=np.int64)
    # vertical edges: (X, Y)-(X, Y+1), flanked by (X-1, Y) and (X, Y)
    X, Y = [a.ravel() for a in np.meshgrid(lines, run, indexing="ij")]
    left = tiling.tile_of_cells(X - 1, Y)
    right = tiling.tile_of_cells(X, Y)
    keep_v = (left >= 0) & (right >= 0)
    v_xy = np.column_stack([X[keep_v], Y[keep_v]])
    v_tiles = np.sort(np.column_stack([left[keep_v], right[keep_v]]), axis=1)

    # horizontal edges: (X, Y)-(X+1, Y), flanked by (X, Y-1) and (X, Y)
    Y, X = [a.ravel() for a in np.meshgrid(lines, run, indexing="ij")]
    below = tiling.tile_of_cells(X, Y - 1)
    above = tiling.tile_of_cells(X, Y)
    keep_h = (below >= 0) & (above >= 0)
    h_xy = np.column_stack([X[keep_h], Y[keep_h]])
    h_tiles = np.sort(np.column_stack([below[keep_h], above[keep_h]]), axis=1)

    seg_xy = np.concatenate([v_xy, h_xy])
    seg_dir = np.concatenate([np.full(len(v_xy), VERTICAL, dtype=np.int8),
                              np.full(len(h_xy), HORIZONTAL, dtype=np.int8)])
    seg_tiles = np.concatenate([v_tiles, h_tiles])

    point_xy, point_tiles = _contact_points(tiling, lines, n)
    return SeparationSet(tiling, seg_xy, seg_dir, seg_tiles, point_xy, point_tiles)


def _contact_points(tiling: Tiling, lines: np.ndarray, n: int):
    """Vertices where two tiles touch without sharing an incident edge."""
    run = np.arange(n + 1, dtype=np.int64)
    vx, vy = [a.ravel() for a in np.meshgrid(lines, run, indexing="ij")]
    hy, hx = [a.ravel() for a in np.meshgrid(lines, run, indexing="ij")]
    key = np.unique(np.concatenate([vx * (n + 1) + vy, hx * (n + 1) + hy]))
    X, Y = key // (n + 1), key % (n + 1)
    ll = tiling.tile_of_cells(X - 1, Y - 1)
    lr = tiling.tile_of_cells(X, Y - 1)
    ul = tiling.tile_of_cells(X - 1, Y)
    ur = tiling.tile_of_cells(X, Y)

    def shares(a, b):
        # tiles a and b are flanking some incident edge at this vertex
        out = np.zeros(len(X), dtype=bool)
        for p, r in ((ll, lr), (ul, ur), (ll, ul), (lr, ur)):
            both = (p >= 0) & (r >= 0)
            out |= both & (((p == a) & (r == b)) | ((p == b) & (r == a)))
        return out

    diag = np.zeros(len(X), dtype=bool)
    for a, b in ((ll, ur), (lr, ul)):
        live = (a >= 0) & (b >= 0) & (a != b)
        diag |= live & ~shares(a, b)
    idx = np.flatnonzero(diag)
    pts = np.column_stack([X[idx], Y[idx]])
    tiles = []
    for i in idx:
        present = {int(t) for t in (ll[i], lr[i], ul[i], ur[i]) if t >= 0}
        tiles.append(tuple(sorted(present)))
    order = np.lexsort((pts[:, 1], pts[:, 0])) if len(pts) else np.zeros(0, int)
    return pts[order].reshape(-1, 2), tuple(tiles[i] for i in order)


@dataclass(frozen=True)
class DimensionEstimate:
    scales: tuple[tuple[int, float, int], ...]
    slope: float
    intercept: float
    r2: float
    j_range: tuple[int, int]

    def to_dict(self) -> dict:
        return {
            "scales": [{"j": j, "epsilon": eps, "N": N} for j, eps, N in self.scales],
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r2,
            "j_range": list(self.j_range),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["j", "epsilon", "N", "logN"])
        for j, eps, N in self.scales:
            writer.writerow([j, repr(eps), N, repr(math.log(N))])
        return buf.getvalue()


def box_counts(obj, j: int) -> int:
    """Number of level-``j`` half-open grid boxes meeting the set.

    The top and right edges of the unit square are folded into the last
    row/column of boxes.
    """
    if isinstance(obj, DigitalFractal):
        b, k = obj.spec.base, obj.depth
        q = b ** (k - j)
        return int(len(np.unique((obj.xs // q) * b**j + obj.ys // q)))
    b, k = obj.base, obj.depth
    q = b ** (k - j)
    top = b**j - 1
    ends = obj.segment_ends()
    # a unit edge spans at most two boxes along its direction: the one
    # holding its start and the one holding its end vertex
    start = np.minimum(ends[:, 0] // q, top)
    stop = np.minimum(ends[:, 1] // q, top)
    pts = np.minimum(obj.point_xy // q, top)
    boxes = np.concatenate([start, stop, pts])
    return int(len(np.unique(boxes[:, 0] * b**j + boxes[:, 1])))


def box_counting_dimension(obj, j_range: tuple[int, int] | None = None
                           ) -> DimensionEstimate:
    """Least-squares slope of ``log N_j`` against ``j log b``.

    ``obj`` is a :class:`DigitalFractal` (default scales ``1..k``) or a
    :class:`SeparationSet` (default scales ``m..k``, i.e. from the tile
    side down to the raster resolution).
    """
    if isinstance(obj, DigitalFractal):
        b, k = obj.spec.base, obj.depth
        if len(obj) == 0:
            raise EmptySetError("fractal has no cells")
        default = (1, k)
    elif isinstance(obj, SeparationSet):
        b, k = obj.base, obj.depth
        if obj.is_empty:
            raise EmptySetError("separation set is empty")
        default = (max(obj.tiling.tile_level, 1), k)
    else:
        raise TypeError(f"cannot box-count a {type(obj).__name__}")
    lo, hi = j_range if j_range is not None else default
    lo, hi = int(lo), int(hi)
    if lo < 0 or hi > k:
        raise InsufficientScalesError(f"scales {lo}..{hi} outside 0..{k}")
    if hi - lo + 1 < 2:
        raise InsufficientScalesError(f"need at least two scales, got {lo}..{hi}")
    js = np.arange(lo, hi + 1)
    counts = np.array([box_counts(obj, int(j)) for j in js])
    x = js * math.log(b)
    y = np.log(counts)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    scales = tuple((int(j), float(b) ** -int(j), int(N)) for j, N in zip(js, counts))
    return DimensionEstimate(scales, float(slope), float(intercept), r2, (lo, hi))


@dataclass(frozen=True)
class RegularityReport:
    d: float
    samples: tuple[tuple[float, float, float, float, float], ...]
    c1_hat: float
    c2_hat: float
    tolerance: float

    @property
    def spread(self) -> float:
        return self.c2_hat / self.c1_hat

    @property
    def passed(self) -> bool:
        return self.spread <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "samples": [
                {"center": [cx, cy], "radius": r, "measure": mu, "ratio": ratio}
                for cx, cy, r, mu, ratio in self.samples
            ],
            "c1_hat": self.c1_hat,
            "c2_hat": self.c2_hat,
            "spread": self.spread,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def ahlfors_regularity_probe(obj, d: float, n_samples: int = 64, n_radii: int = 6,
                             radius_range: tuple[float, float] | None = None,
                             seed: int = 42, tolerance: float = 50.0,
                             margin: float = 0.0) -> RegularityReport:
    """Empirical Ahlfors constants ``min/max mu(B(x, r)) / r**d``.

    For a fractal, ``mu`` counts cells whose center lies in the ball times
    ``side**d``; for a separation set it is the total length of segments
    whose midpoint lies in the ball.  Centers are drawn without replacement
    from the set's elements with a seeded generator; elements closer than
    ``margin`` to the set's bounding box are not used as centers.
    """
    if not d > 0:
        raise InvalidDimensionError(f"dimension must be positive, got {d}")
    if isinstance(obj, DigitalFractal):
        b, k = obj.spec.base, obj.depth
        if len(obj) == 0:
            raise EmptySetError("fractal has no cells")
        pts = obj.centers()
        side = 1.0 / obj.grid_size
        weight = side**d
        lo_box, hi_box = obj.cells.min(axis=0) * side, (obj.cells.max(axis=0) + 1) * side
    elif isinstance(obj, SeparationSet):
        b, k = obj.base, obj.depth
        if obj.n_segments == 0:
            raise EmptySetError("separation set has no segments to measure")
        side = 1.0 / obj.tiling.fractal.grid_size
        pts = obj.segment_ends().sum(axis=1) * (side / 2)
        weight = side
        ends = obj.segment_ends().reshape(-1, 2) * side
        lo_box, hi_box = ends.min(axis=0), ends.max(axis=0)
    else:
        raise TypeError(f"cannot probe a {type(obj).__name__}")

    diam = float(np.hypot(*(hi_box - lo_box)))
    floor = float(b) ** -(k - 2)
    if radius_range is None:
        radius_range = (floor, diam / 2)
    r_lo, r_hi = map(float, radius_range)
    eps = 1e-12
    if not (0 < r_lo <= r_hi) or r_lo < floor - eps or r_hi > diam / 2 + eps:
        raise InvalidRadiusRangeError(
            f"radius range ({r_lo}, {r_hi}) must lie in [{floor}, {diam / 2}]"
        )

    eligible = np.flatnonzero(np.all((pts >= lo_box + margin) & (pts <= hi_box - margin),
                                     axis=1))
    if len(eligible) == 0:
        raise EmptySetError("no sample centers left after applying the margin")
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(eligible, size=min(n_samples, len(eligible)),
                                replace=False))
    centers = pts[chosen]
    radii = np.geomspace(r_lo, r_hi, n_radii)
    tree = cKDTree(pts)
    samples = []
    for r in radii:
        counts = tree.query_ball_point(centers, r, return_length=True)
        for (cx, cy), cnt in zip(centers, counts):
            mu = float(cnt) * weight
            samples.append((float(cx), float(cy), float(r), mu, mu / float(r) ** d))
    ratios = [s[4] for s in samples]
    return RegularityReport(float(d), tuple(samples), min(ratios), max(ratios),
                            float(tolerance))

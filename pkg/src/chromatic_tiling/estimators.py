"""scikit-learn style wrappers around the functional API.

These follow the estimator conventions (constructor stores parameters
untouched, ``fit`` returns ``self``, learned state ends in ``_``) so the
pieces can be cloned, grid-searched over ``c`` or ``tile_level``, and
dropped into pipelines that expect ``get_params``/``set_params``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .graph import SUBSPACE_BALL
from .ifs_core import DigitalFractal, FractalSpec, load_spec, rasterize, validate_spec
from .partition import AMBIENT
from .separation import (SeparationSet, ahlfors_regularity_probe,
                         box_counting_dimension)
from .theorem import analyze


def _as_spec(X) -> FractalSpec:
    if isinstance(X, FractalSpec):
        return X
    if isinstance(X, str):
        return load_spec(X)
    return validate_spec(X)


def _as_set(X, depth):
    if isinstance(X, (DigitalFractal, SeparationSet)):
        return X
    if depth is None:
        raise ValueError("depth is required when fitting on a spec")
    return rasterize(_as_spec(X), depth)


class BoxCountingDimension(BaseEstimator):
    """Box-counting dimension of a rasterized fractal or separation set.

    ``fit`` accepts a :class:`DigitalFractal`, a :class:`SeparationSet`, or
    a spec (preset name, mapping, :class:`FractalSpec`) together with
    ``depth``.
    """

    def __init__(self, depth=None, j_range=None):
        self.depth = depth
        self.j_range = j_range

    def fit(self, X, y=None):
        est = box_counting_dimension(_as_set(X, self.depth), self.j_range)
        self.estimate_ = est
        self.dimension_ = est.slope
        self.r2_ = est.r2
        return self

    def score(self, X=None, y=None):
        check_is_fitted(self, "estimate_")
        return self.r2_


class AhlforsRegularityProbe(BaseEstimator):
    """Empirical Ahlfors constants; ``d=None`` probes at the box-counting
    dimension of the input."""

    def __init__(self, d=None, depth=None, n_samples=64, n_radii=6,
                 radius_range=None, seed=42, tolerance=50.0, margin=0.0):
        self.d = d
        self.depth = depth
        self.n_samples = n_samples
        self.n_radii = n_radii
        self.radius_range = radius_range
        self.seed = seed
        self.tolerance = tolerance
        self.margin = margin

    def fit(self, X, y=None):
        obj = _as_set(X, self.depth)
        d = self.d if self.d is not None else box_counting_dimension(obj).slope
        rep = ahlfors_regularity_probe(
            obj, d, n_samples=self.n_samples, n_radii=self.n_radii,
            radius_range=self.radius_range, seed=self.seed,
            tolerance=self.tolerance, margin=self.margin,
        )
        self.report_ = rep
        self.c1_ = rep.c1_hat
        self.c2_ = rep.c2_hat
        self.passed_ = rep.passed
        return self


class ChromaticTilingAnalyzer(TransformerMixin, BaseEstimator):
    """Partition, separation set, graph and coloring of one carpet.

    After ``fit(spec)``, ``predict(points)`` returns the color of the tile
    containing each point of the unit square (``-1`` off the fractal at
    raster depth), and ``transform(points)`` returns the tile index.
    """

    def __init__(self, tile_level=1, depth=None, k_offset=3, mode=AMBIENT,
                 c=0.5, substantiality=SUBSPACE_BALL, seed=42, n_samples=64,
                 n_radii=6, tolerance=50.0, node_budget=1_000_000):
        self.tile_level = tile_level
        self.depth = depth
        self.k_offset = k_offset
        self.mode = mode
        self.c = c
        self.substantiality = substantiality
        self.seed = seed
        self.n_samples = n_samples
        self.n_radii = n_radii
        self.tolerance = tolerance
        self.node_budget = node_budget

    def fit(self, X, y=None):
        spec = _as_spec(X)
        k = self.depth if self.depth is not None else self.tile_level + self.k_offset
        an = analyze(spec, self.tile_level, k, mode=self.mode, c=self.c,
                     seed=self.seed, n_samples=self.n_samples, n_radii=self.n_radii,
                     tolerance=self.tolerance, node_budget=self.node_budget,
                     substantiality_mode=self.substantiality)
        self.spec_ = spec
        self.analysis_ = an
        self.tiling_ = an.tiling
        self.separation_ = an.sep
        self.graph_ = an.graph
        self.coloring_ = an.coloring
        self.grp_report_ = an.grp
        self.bound_row_ = an.row
        self.chromatic_number_ = an.coloring.num_colors
        self.max_degree_ = an.graph.max_degree
        self.d_sep_ = an.row.d_sep
        return self

    def transform(self, X):
        check_is_fitted(self, "tiling_")
        pts = check_array(X, dtype=np.float64)
        if pts.shape[1] != 2:
            raise ValueError(f"expected points of shape (n, 2), got {pts.shape}")
        n = self.tiling_.fractal.grid_size
        cells = np.floor(np.clip(pts, 0.0, 1.0) * n).astype(np.int64)
        cells = np.minimum(cells, n - 1)
        inside = ((pts >= 0) & (pts <= 1)).all(axis=1)
        tiles = self.tiling_.tile_of_cells(cells[:, 0], cells[:, 1])
        return np.where(inside, tiles, -1)

    def predict(self, X):
        tiles = self.transform(X)
        colors = np.asarray(self.coloring_.colors, dtype=np.int64)
        safe = np.where(tiles >= 0, tiles, 0)
        return np.where(tiles >= 0, colors[safe], -1)

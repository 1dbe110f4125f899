"""Acceptance criteria, one marked group per criterion.

``conftest.py`` prints one PASS/FAIL line per criterion after the run.
"""

import json
import math
import time

import networkx as nx
import numpy as np
import pytest

from chromatic_tiling import (INTRINSIC, PRESETS, BoundReport, analyze,
                              box_counting_dimension, canonical_partition,
                              exact_chromatic, grp_check, packing_number, rasterize,
                              separation_set, tile_metrics)
from chromatic_tiling.cli import main

from conftest import SYNTHETIC
from oracles import brute_edges, chromatic_number_brute, intrinsic_brute
from properties import check_case, draw_case

SQRT2 = math.sqrt(2)
SWEEP_SPECS = ("sierpinski-carpet", "vicsek", "full-square", "cantor-dust")
SWEEP_M = (1, 2, 3)
K_OFFSET = 3


@pytest.fixture(scope="module")
def sweep():
    """Full analyses for every (spec, m) of the sweep suite, k = m + 3."""
    return {(name, m): analyze(PRESETS[name], m, m + K_OFFSET)
            for name in SWEEP_SPECS for m in SWEEP_M}


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


# 1. carpet dimension

@pytest.mark.acceptance(1)
def test_c01_carpet_dimension(carpet):
    t0 = time.perf_counter()
    est = box_counting_dimension(rasterize(carpet, 6))
    elapsed = time.perf_counter() - t0
    assert abs(est.slope - math.log(8) / math.log(3)) <= 0.03
    assert elapsed < 10


# 2. separation dimension

@pytest.mark.acceptance(2)
@pytest.mark.parametrize("m", [1, 2, 3])
def test_c02_separation_dimension(carpet, m):
    t0 = time.perf_counter()
    sep = separation_set(canonical_partition(rasterize(carpet, m + 4), m))
    est = box_counting_dimension(sep)
    elapsed = time.perf_counter() - t0
    assert abs(est.slope - 1.0) <= 0.05, est.slope
    assert elapsed < 30


# 3. GRP verification

@pytest.mark.acceptance(3)
@pytest.mark.parametrize("m", [1, 2, 3])
def test_c03_grp_carpet(carpet, m):
    rep = grp_check(canonical_partition(rasterize(carpet, m + K_OFFSET), m), c=0.5)
    assert rep.mode == "ambient-center"
    assert rep.overall


# 4. radius ratio

@pytest.mark.acceptance(4)
@pytest.mark.parametrize("m", [1, 2, 3])
def test_c04_ambient_ratio(carpet, m):
    tiling = canonical_partition(rasterize(carpet, m + 1), m)
    assert all(t.metrics.ratio == SQRT2 for t in tiling.tiles)
    assert tiling.ratio == SQRT2


@pytest.mark.acceptance(4)
def test_c04_intrinsic_oracle_km4(carpet):
    # exhaustive center search over the worst tile at k - m = 4
    tiling = canonical_partition(rasterize(carpet, 6), 2, INTRINSIC)
    worst = max(tiling.tiles, key=lambda t: t.metrics.ratio)
    rmin, rmax, _ = intrinsic_brute(tiling, worst, window=True)
    assert rmin < float(tiling.tile_side)
    assert tiling.ratio == pytest.approx(rmax / rmin, abs=1e-9)


@pytest.mark.acceptance(4)
def test_c04_intrinsic_converges(carpet):
    gaps = []
    for km in (2, 3, 4, 5):
        tiling = canonical_partition(rasterize(carpet, 2 + km), 2)
        tile = next(t for t in tiling.tiles if t.id == (2, 2))
        gaps.append(abs(tile_metrics(tiling, tile, INTRINSIC).ratio - 2.5))
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] <= 0.05


# 5. graph facts by independent enumeration

@pytest.mark.acceptance(5)
def test_c05_carpet_m1_cycle(sweep):
    an = sweep[("sierpinski-carpet", 1)]
    assert list(an.graph.edges) == brute_edges(an.tiling)
    assert nx.is_isomorphic(to_nx(an.graph), nx.cycle_graph(8))
    assert an.graph.max_degree == 2 and an.coloring.num_colors == 2
    assert chromatic_number_brute(an.graph.n, an.graph.edges) == 2


@pytest.mark.acceptance(5)
def test_c05_carpet_m2(sweep):
    an = sweep[("sierpinski-carpet", 2)]
    assert list(an.graph.edges) == brute_edges(an.tiling)
    assert an.graph.max_degree == 4 and an.coloring.num_colors == 2
    assert an.coloring.optimal


@pytest.mark.acceptance(5)
def test_c05_dust_edgeless(sweep):
    an = sweep[("cantor-dust", 1)]
    assert an.graph.edges == () and brute_edges(an.tiling) == []
    assert an.coloring.num_colors == 1


@pytest.mark.acceptance(5)
def test_c05_full_square_grid(sweep):
    an = sweep[("full-square", 1)]
    assert list(an.graph.edges) == brute_edges(an.tiling)
    assert nx.is_isomorphic(to_nx(an.graph), nx.grid_2d_graph(3, 3))
    centre = next(t.index for t in an.tiling.tiles if t.id == (1, 1))
    assert an.graph.degree_table[centre] == 4 == an.graph.max_degree
    assert an.coloring.num_colors == 2


@pytest.mark.acceptance(5)
@pytest.mark.parametrize("name", sorted(SYNTHETIC))
def test_c05_exact_matches_exhaustive(name):
    g = SYNTHETIC[name]
    assert g.n <= 12
    assert exact_chromatic(g).num_colors == chromatic_number_brute(g.n, g.edges)


# 6. Brooks

@pytest.mark.acceptance(6)
def test_c06_brooks(sweep):
    violations = [key for key, an in sweep.items()
                  if an.coloring.num_colors > an.graph.max_degree + 1]
    assert violations == []
    assert all(an.row.brooks_ok for an in sweep.values())


# 7. theorem inequality

@pytest.mark.acceptance(7)
def test_c07_fitted_constant(sweep):
    carpet = BoundReport([sweep[("sierpinski-carpet", m)].row for m in SWEEP_M])
    assert carpet.fitted_c == pytest.approx(SQRT2, abs=0.1)


@pytest.mark.acceptance(7)
def test_c07_theorem_inequality(sweep):
    frozen = BoundReport([sweep[("sierpinski-carpet", m)].row for m in SWEEP_M]).fitted_c
    report = BoundReport([an.row for an in sweep.values()])
    ok = report.theorem_ok(c_const=frozen, tol=0.05)
    bad = [(r.spec, r.m) for r, good in zip(report.rows, ok) if not good]
    assert bad == []


# 8. packing-degree link

@pytest.mark.acceptance(8)
def test_c08_packing_degree(sweep):
    violations = []
    for key, an in sweep.items():
        for t, deg in zip(an.tiling.tiles, an.graph.degree_table):
            mt = t.metrics
            count = packing_number(an.sep, mt.center, mt.r_max, 0.5 * mt.r_min / 2).count
            if deg > count:
                violations.append((key, t.id, deg, count))
    assert violations == []


# 9. determinism

@pytest.mark.acceptance(9)
def test_c09_verify_byte_identical(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"spec": "sierpinski-carpet", "k": 5, "m": 2, "seed": 7}))
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
    for name in ("report.json", "report.csv", "scene.svg"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name


# 10. property suite

@pytest.mark.acceptance(10)
def test_c10_property_suite():
    rng = np.random.default_rng(20261015)
    t0 = time.perf_counter()
    n_cases = 0
    for _ in range(240):
        check_case(*draw_case(rng))
        n_cases += 1
    elapsed = time.perf_counter() - t0
    print(f"property suite: {n_cases} cases in {elapsed:.1f} s")
    assert n_cases >= 200
    assert elapsed < 60

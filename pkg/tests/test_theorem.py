import math

import pytest

from chromatic_tiling import (PRESETS, analyze, build_partition_graph,
                              canonical_partition, degree_bound_check, grp_check,
                              packing_number, rasterize, scaling_sweep, separation_set)
from chromatic_tiling.ifs_core import DEFAULT_CELL_BUDGET
from chromatic_tiling.theorem import (CSV_COLUMNS, BoundReport, _sweep_row,
                                      constant_from_rows, merge_reports,
                                      packing_degree_check)

SQRT2 = math.sqrt(2)


def setup(spec, m, k, c=0.5):
    tiling = canonical_partition(rasterize(spec, k), m)
    sep = separation_set(tiling)
    return tiling, sep, build_partition_graph(tiling, sep, c)


def test_packing_example(carpet):
    tiling, sep, g = setup(carpet, 1, 4)
    t = next(t for t in tiling.tiles if t.id == (1, 0))
    res = packing_number(sep, t.metrics.center, t.metrics.r_max, 0.5 * t.metrics.r_min)
    assert res.count >= 2 == g.degree_table[t.index]
    # accepted centers are pairwise at least 2r apart and inside the ball
    pts = res.centers
    for i in range(len(pts)):
        assert math.dist(pts[i], t.metrics.center) <= res.R + 1e-12
        for j in range(i):
            assert math.dist(pts[i], pts[j]) >= 2 * res.r - 1e-12


def test_packing_empty(carpet, dust):
    _, sep, _ = setup(dust, 1, 3)
    assert packing_number(sep, (0.5, 0.5), 0.3, 0.1).count == 0
    _, sep, _ = setup(carpet, 1, 3)
    # the centre of the hole is 1/6 from the nearest separation element
    assert packing_number(sep, (0.5, 0.5), 0.1, 0.1).count == 0


def test_packing_bad_radii(carpet):
    _, sep, _ = setup(carpet, 1, 2)
    with pytest.raises(ValueError):
        packing_number(sep, (0.5, 0.5), 0.1, 0.2)
    with pytest.raises(ValueError):
        packing_number(sep, (0.5, 0.5), 0.1, 0.0)


def test_packing_monotone_in_r(carpet):
    tiling, sep, _ = setup(carpet, 2, 5)
    t = tiling.tiles[10]
    counts = [packing_number(sep, t.metrics.center, t.metrics.r_max, r).count
              for r in (0.002, 0.005, 0.01, 0.02)]
    assert counts[0] >= counts[-1]


@pytest.mark.parametrize("name, m", [("sierpinski-carpet", 2), ("full-square", 1),
                                     ("cantor-dust", 1)])
def test_degree_bound(name, m):
    tiling, sep, g = setup(PRESETS[name], m, m + 3)
    rep = grp_check(tiling, sep=sep)
    db = degree_bound_check(tiling, g, sep, rep.regularity, 0.5)
    assert db.all_ok and db.violations == []
    assert db.degrees == g.degree_table


def test_degree_bound_needs_regularity(carpet):
    tiling, sep, g = setup(carpet, 1, 3)
    with pytest.raises(ValueError):
        degree_bound_check(tiling, g, sep, None, 0.5)


def test_packing_degree_link(carpet):
    tiling, sep, g = setup(carpet, 2, 5)
    for deg, count in packing_degree_check(tiling, g, sep, 0.5):
        assert deg <= count


def test_analyze_row(carpet):
    an = analyze(carpet, 1, 4, d_sep_analytic=1.0)
    r = an.row
    assert (r.chi, r.max_degree, r.n_tiles, r.n_edges) == (2, 2, 8, 8)
    assert r.chi_exact and r.brooks_ok and r.grp_ok and r.packing_ok
    assert r.ratio == SQRT2
    assert r.rhs_analytic == pytest.approx(SQRT2)
    assert r.c_row == pytest.approx(2 / SQRT2 ** r.d_sep)


def test_analyze_falls_back_to_dsatur(carpet):
    an = analyze(carpet, 2, 3, vertex_limit=10)
    assert not an.row.chi_exact
    assert an.coloring.algorithm == "dsatur"
    assert an.row.chi == 2


def test_sweep_carpet():
    rep = scaling_sweep(PRESETS["sierpinski-carpet"], [1, 2, 3])
    assert [r.chi for r in rep.rows] == [2, 2, 2]
    assert all(r.ratio == SQRT2 for r in rep.rows)
    assert rep.brooks_ok
    assert rep.fitted_c == pytest.approx(SQRT2, abs=0.1)
    assert all(rep.theorem_ok())


def test_sweep_full_square():
    rep = scaling_sweep(PRESETS["full-square"], [1, 2])
    assert [r.chi for r in rep.rows] == [2, 2]
    # coarse boxes saturate on the full grid, pulling d_sep a little above 1
    assert all(1.0 <= r.d_sep <= 1.25 for r in rep.rows)
    assert rep.fitted_c == pytest.approx(SQRT2, abs=0.1)


def test_sweep_dust():
    rep = scaling_sweep(PRESETS["cantor-dust"], [1, 2])
    assert [r.chi for r in rep.rows] == [1, 1]
    assert all(r.d_sep == 0.0 for r in rep.rows)
    assert rep.fitted_c == 1.0


def test_sweep_budget_error_row():
    rep = scaling_sweep(PRESETS["sierpinski-carpet"], [1], k_offset=3, vertex_limit=4096)
    ok = rep.rows[0]
    assert not ok.error
    bad = _sweep_row((PRESETS["full-square"], 1, 12, "ambient-center", {}))
    assert 9**12 > DEFAULT_CELL_BUDGET
    assert bad.error and math.isnan(bad.ratio)
    merged = merge_reports([rep, BoundReport([bad])])
    assert merged.fitted_c == rep.fitted_c
    assert all(merged.theorem_ok())
    assert constant_from_rows(merged.rows) == rep.fitted_c


def test_sweep_parallel_matches_serial():
    a = scaling_sweep(PRESETS["sierpinski-carpet"], [1, 2], jobs=1)
    b = scaling_sweep(PRESETS["sierpinski-carpet"], [1, 2], jobs=2)
    assert a.to_csv() == b.to_csv()


def test_report_csv(carpet):
    rep = scaling_sweep(carpet, [1])
    lines = rep.to_csv().splitlines()
    assert lines[0].split(",") == CSV_COLUMNS
    assert len(lines) == 2
    d = rep.to_dict()
    assert d["fitted_c"] == rep.fitted_c and len(d["rows"]) == 1


def test_theorem_ok_frozen_constant(carpet):
    rep = scaling_sweep(carpet, [1])
    assert rep.theorem_ok(c_const=SQRT2) == [True]
    assert rep.theorem_ok(c_const=1.0) == [False]

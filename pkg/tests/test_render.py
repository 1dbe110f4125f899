import re
import xml.etree.ElementTree as ET

import pytest

from chromatic_tiling import (canonical_partition, exact_chromatic, packing_number,
                              rasterize, separation_set, build_partition_graph)
from chromatic_tiling.render import (CELL_GRAY, LAYER_ORDER, PALETTE, SEP_RED,
                                     build_scene, normalize_layers, render_svg)

NS = "{http://www.w3.org/2000/svg}"


def artifacts(spec, m, k):
    tiling = canonical_partition(rasterize(spec, k), m)
    sep = separation_set(tiling)
    coloring = exact_chromatic(build_partition_graph(tiling, sep))
    return tiling, sep, coloring


def layer(svg_text, name):
    root = ET.fromstring(svg_text)
    return next(g for g in root.iter(NS + "g") if g.get("id") == name)


def test_cells_layer(carpet):
    f = rasterize(carpet, 3)
    scene = build_scene(f, layers="cells")
    rects = list(layer(scene.to_svg(), "cells"))
    assert len(rects) == 512
    assert {r.get("fill") for r in rects} == {CELL_GRAY}


def test_fill_colors(carpet):
    tiling, sep, coloring = artifacts(carpet, 1, 2)
    scene = build_scene(tiling.fractal, tiling, sep, coloring, layers="fills")
    fills = {r.get("fill") for r in layer(scene.to_svg(), "fills")}
    assert fills == set(PALETTE[:2])


def test_separation_layer(carpet):
    tiling, sep, coloring = artifacts(carpet, 1, 1)
    scene = build_scene(tiling.fractal, tiling, sep, coloring, layers=["sep"])
    g = layer(scene.to_svg(), "separation")
    assert len(g.findall(NS + "line")) == 8
    assert len(g.findall(NS + "circle")) == 4
    assert all(e.get("stroke") == SEP_RED for e in g.findall(NS + "line"))


def test_ball_layer(carpet):
    tiling, sep, coloring = artifacts(carpet, 1, 3)
    t = tiling.tiles[1]
    res = packing_number(sep, t.metrics.center, t.metrics.r_max, 0.5 * t.metrics.r_min)
    scene = build_scene(tiling.fractal, tiling, sep, coloring, [res], layers="balls",
                        size=300)
    circles = list(layer(scene.to_svg(), "balls"))
    assert len(circles) == res.count
    assert float(circles[0].get("r")) == pytest.approx(res.r * 300, abs=1e-4)


def test_boundaries_and_order(carpet):
    tiling, sep, coloring = artifacts(carpet, 1, 2)
    svg = build_scene(tiling.fractal, tiling, sep, coloring).to_svg()
    ids = re.findall(r'<g id="(\w+)">', svg)
    assert ids == ["cells", "fills", "separation", "boundaries"]
    assert len(list(layer(svg, "boundaries"))) == 8


def test_y_axis_points_up(carpet):
    f = rasterize(carpet, 1)
    rects = list(layer(build_scene(f, layers="cells", size=90).to_svg(), "cells"))
    # the first cell sits at the bottom-left of the unit square
    assert (rects[0].get("x"), rects[0].get("y")) == ("0", "60")


def test_layer_names():
    assert normalize_layers(None) == LAYER_ORDER
    assert normalize_layers("balls,sep") == ("separation", "balls")
    with pytest.raises(ValueError):
        normalize_layers("cells,glow")


def test_render_file(tmp_path, carpet):
    scene = build_scene(rasterize(carpet, 2), layers="cells")
    path = render_svg(scene, tmp_path / "a" / "scene.svg")
    assert path.read_text() == scene.to_svg()
    ET.parse(path)

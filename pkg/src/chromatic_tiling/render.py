"""SVG figures of fractals, tilings, colorings and separation sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

# fixed so that figures compare across machines
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2",
    "#17becf", "#bcbd22", "#7f7f7f", "#aec7e8", "#ffbb78", "#98df8a",
)
CELL_GRAY = "#9e9e9e"
SEP_RED = "#d62728"

LAYER_ORDER = ("cells", "fills", "separation", "boundaries", "balls")
LAYER_ALIASES = {"sep": "separation", "fill": "fills", "ball": "balls",
                 "packing": "balls", "tiles": "boundaries", "cell": "cells"}


def _fmt(v: float) -> str:
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


@dataclass
class SvgScene:
    size: int = 512
    layers: dict[str, list[str]] = field(default_factory=dict)

    def add(self, layer: str, element: str) -> None:
        if layer not in LAYER_ORDER:
            raise ValueError(f"unknown layer {layer!r}")
        self.layers.setdefault(layer, []).append(element)

    def count(self, layer: str) -> int:
        return len(self.layers.get(layer, []))

    def to_svg(self) -> str:
        s = self.size
        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" '
            f'viewBox="0 0 {s} {s}">',
            f'<rect x="0" y="0" width="{s}" height="{s}" fill="white"/>',
        ]
        for name in LAYER_ORDER:
            if name in self.layers:
                out.append(f'<g id="{name}">')
                out.extend(self.layers[name])
                out.append("</g>")
        out.append("</svg>")
        return "\n".join(out) + "\n"


def normalize_layers(layers) -> tuple[str, ...]:
    if layers is None:
        return LAYER_ORDER
    if isinstance(layers, str):
        layers = [x for x in layers.split(",") if x]
    names = []
    for x in layers:
        x = LAYER_ALIASES.get(x.strip(), x.strip())
        if x not in LAYER_ORDER:
            raise ValueError(f"unknown layer {x!r}; choose from {LAYER_ORDER}")
        names.append(x)
    return tuple(n for n in LAYER_ORDER if n in names)


def build_scene(fractal, tiling=None, sep=None, coloring=None, packings=(),
                layers=None, size: int = 512) -> SvgScene:
    """Assemble the layers that the supplied artifacts allow.

    Unit-square coordinates map to pixels with ``y`` pointing up.
    """
    wanted = normalize_layers(layers)
    scene = SvgScene(size)
    n = fractal.grid_size
    px = size / n

    def rect(x, y, w, style):
        return (f'<rect x="{_fmt(x * px)}" y="{_fmt(size - (y + w) * px)}" '
                f'width="{_fmt(w * px)}" height="{_fmt(w * px)}" {style}/>')

    if "cells" in wanted:
        for x, y in zip(fractal.xs.tolist(), fractal.ys.tolist()):
            scene.add("cells", rect(x, y, 1, f'fill="{CELL_GRAY}"'))
    if "fills" in wanted and tiling is not None and coloring is not None:
        for t in tiling.tiles:
            color = PALETTE[coloring.colors[t.index] % len(PALETTE)]
            cells = tiling.member_cells(t)
            for x, y in cells.tolist():
                scene.add("fills", rect(x, y, 1, f'fill="{color}"'))
    if "separation" in wanted and sep is not None:
        width = _fmt(max(1.0, size / 256))
        for (x0, y0), (x1, y1) in sep.segment_ends().tolist():
            scene.add("separation",
                      f'<line x1="{_fmt(x0 * px)}" y1="{_fmt(size - y0 * px)}" '
                      f'x2="{_fmt(x1 * px)}" y2="{_fmt(size - y1 * px)}" '
                      f'stroke="{SEP_RED}" stroke-width="{width}"/>')
        for x, y in sep.point_xy.tolist():
            scene.add("separation",
                      f'<circle cx="{_fmt(x * px)}" cy="{_fmt(size - y * px)}" '
                      f'r="{width}" fill="{SEP_RED}"/>')
    if "boundaries" in wanted and tiling is not None:
        q = tiling.cells_per_side
        for t in tiling.tiles:
            scene.add("boundaries",
                      rect(t.address.x * q, t.address.y * q, q,
                           'fill="none" stroke="black" stroke-width="1"'))
    if "balls" in wanted:
        for res in packings:
            r = res.r * size
            for cx, cy in res.centers.tolist():
                scene.add("balls",
                          f'<circle cx="{_fmt(cx * size)}" cy="{_fmt((1 - cy) * size)}" '
                          f'r="{_fmt(r)}" fill="none" stroke="black" stroke-width="1"/>')
    return scene


def render_svg(scene: SvgScene, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(scene.to_svg())
    return path

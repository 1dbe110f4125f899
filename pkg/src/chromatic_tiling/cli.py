"""Command-line entry point.

Every subcommand writes its artifacts (``report.json`` plus ``report.csv``
or ``scene.svg`` where relevant) into the output directory and prints a
one-line summary.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import __version__
from .exceptions import (BudgetExceededError, BudgetExhausted,
                         ChromaticTilingError, EmptySetError, SpecError)
from .graph import (DIAMETER, SUBSPACE_BALL, build_partition_graph,
                    dsatur_coloring, exact_chromatic, greedy_coloring)
from .ifs_core import (DEFAULT_CELL_BUDGET, PRESETS, load_spec, rasterize,
                       similarity_dimension)
from .partition import AMBIENT, MODES, canonical_partition, grp_check
from .render import build_scene, render_svg
from .separation import box_counting_dimension, separation_set
from .theorem import analyze, merge_reports, packing_number, scaling_sweep

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_BUDGET = 4
EXIT_EMPTY = 5

OUTPUT_ENV = "CHROMATIC_TILING_OUT"

# analytic separation dimensions for presets whose interfaces are full edges
ANALYTIC_D_SEP = {"sierpinski-carpet": 1.0, "full-square": 1.0}

EPILOG = f"""\
exit codes:
  {EXIT_OK}  success
  {EXIT_FAILED}  a verification check failed (Brooks, theorem inequality, GRP)
  {EXIT_USAGE}  usage error or unknown subcommand
  {EXIT_CONFIG}  invalid configuration or fractal spec
  {EXIT_BUDGET}  cell or search budget exceeded
  {EXIT_EMPTY}  empty input (e.g. no separation set to measure)

output directory: --out, else ${OUTPUT_ENV}, else ./out
"""


@dataclass
class RunConfig:
    spec: str = "sierpinski-carpet"
    k: int = 4
    m: int = 1
    mode: str = AMBIENT
    c: float = 0.5
    seed: int = 42
    samples: int = 64
    radii: int = 6
    tolerance: float = 50.0
    node_budget: int = 1_000_000
    cell_budget: int = DEFAULT_CELL_BUDGET
    substantiality: str = SUBSPACE_BALL
    output_dir: str = "out"
    algorithm: str = "exact"
    layers: str = "cells,fills,separation,boundaries,balls"
    size: int = 512
    m_list: str = "1,2,3"
    k_offset: int = 3
    presets: str = ""
    jobs: int = 1
    frozen_c: float | None = None

    def validate(self) -> "RunConfig":
        problems = []
        if self.k < 0:
            problems.append("k must be >= 0")
        if not 0 <= self.m <= self.k:
            problems.append(f"need 0 <= m <= k (m={self.m}, k={self.k})")
        if self.mode not in MODES:
            problems.append(f"mode must be one of {MODES}")
        if not self.c > 0:
            problems.append("c must be positive")
        if self.samples < 1 or self.radii < 1:
            problems.append("samples and radii must be >= 1")
        if not self.tolerance >= 1:
            problems.append("tolerance must be >= 1")
        if self.node_budget < 1 or self.cell_budget < 1:
            problems.append("budgets must be positive")
        if self.substantiality not in (SUBSPACE_BALL, DIAMETER):
            problems.append(f"substantiality must be {SUBSPACE_BALL} or {DIAMETER}")
        if self.algorithm not in ("greedy", "dsatur", "exact"):
            problems.append("algorithm must be greedy, dsatur or exact")
        if self.jobs < 1:
            problems.append("jobs must be >= 1")
        if problems:
            raise SpecError("; ".join(problems))
        return self


def _add_common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(PRESETS), dest="spec",
                     help="shipped fractal spec")
    src.add_argument("--spec-file", dest="spec", help="JSON spec file")
    p.add_argument("--config", help="JSON file mirroring RunConfig; flags override it")
    p.add_argument("--k", type=int, help="raster depth")
    p.add_argument("--m", type=int, help="tile level")
    p.add_argument("--mode", choices=MODES, help="tile radius mode")
    p.add_argument("--c", type=float, help="substantiality constant")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, help="regularity probe centers")
    p.add_argument("--radii", type=int, help="regularity probe radii")
    p.add_argument("--tolerance", type=float, help="max c2/c1 for the probe")
    p.add_argument("--node-budget", type=int, dest="node_budget")
    p.add_argument("--cell-budget", type=int, dest="cell_budget")
    p.add_argument("--substantiality", choices=(SUBSPACE_BALL, DIAMETER))
    p.add_argument("--out", dest="output_dir", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chromatic-tiling",
        description="Carpet partitions, separation dimension and chromatic bounds.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")
    helps = {
        "spec": "validate a spec and report its similarity dimension",
        "rasterize": "rasterize to depth k and box-count the result",
        "partition": "canonical level-m partition with tile radii",
        "grp-check": "check the three regularity conditions",
        "sep-dim": "box-counting dimension of the separation set",
        "graph": "build the partition graph (edge list, DIMACS)",
        "color": "color the partition graph",
        "verify": "full pipeline for one tiling: bound report and figure",
        "sweep": "bound report over tile levels and presets",
        "render": "draw cells, colors, separation set and packings",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text, epilog=EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        _add_common(p)
        if name == "color":
            p.add_argument("--algorithm", choices=("greedy", "dsatur", "exact"))
        if name in ("render", "verify"):
            p.add_argument("--layers", help="comma list of " + ",".join(
                ("cells", "fills", "sep", "boundaries", "balls")))
            p.add_argument("--size", type=int, help="canvas size in pixels")
        if name in ("verify", "sweep"):
            p.add_argument("--frozen-c", type=float, dest="frozen_c",
                           help="constant C for the theorem inequality")
        if name == "sweep":
            p.add_argument("--m-list", dest="m_list", help="e.g. 1,2,3")
            p.add_argument("--k-offset", type=int, dest="k_offset")
            p.add_argument("--presets", help="comma list; default: --preset/--spec-file")
            p.add_argument("--jobs", type=int)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    merged = {}
    env_out = os.environ.get(OUTPUT_ENV)
    if env_out:
        merged["output_dir"] = env_out
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise SpecError(f"unknown config keys: {sorted(unknown)}")
        merged.update(data)
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            merged[f.name] = val
    return RunConfig(**merged).validate()


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = resolve_config(args)
        spec = load_spec(cfg.spec)
    except (SpecError, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](cfg, spec, out)
    except EmptySetError as exc:
        print(f"empty: {exc}")
        return EXIT_EMPTY
    except (BudgetExceededError, BudgetExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ChromaticTilingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _tiling(cfg, spec):
    fractal = rasterize(spec, cfg.k, cfg.cell_budget)
    return canonical_partition(fractal, cfg.m, cfg.mode)


def cmd_spec(cfg, spec, out):
    payload = spec.to_dict() | {"similarity_dimension": similarity_dimension(spec)}
    _write_json(out / "spec.json", spec.to_dict())
    _write_json(out / "report.json", payload)
    print(f"{spec.name}: base {spec.base}, {spec.n_maps} maps, "
          f"dimension {payload['similarity_dimension']:.6f}")
    return EXIT_OK


def cmd_rasterize(cfg, spec, out):
    fractal = rasterize(spec, cfg.k, cfg.cell_budget)
    payload = {"spec": spec.to_dict(), "k": cfg.k, "n_cells": len(fractal),
               "similarity_dimension": similarity_dimension(spec)}
    if cfg.k >= 2:
        est = box_counting_dimension(fractal)
        payload["box_counting"] = est.to_dict()
        (out / "report.csv").write_text(est.to_csv())
    _write_json(out / "report.json", payload)
    print(f"{spec.name} k={cfg.k}: {len(fractal)} cells")
    return EXIT_OK


def cmd_partition(cfg, spec, out):
    tiling = _tiling(cfg, spec)
    payload = {
        "spec": spec.name, "k": cfg.k, "m": cfg.m, "mode": cfg.mode,
        "ratio": tiling.ratio, "r_min": tiling.r_min, "r_max": tiling.r_max,
        "tiles_connected": tiling.tiles_connected,
        "tiles": [{"id": list(t.id), "n_cells": t.stop - t.start,
                   "metrics": t.metrics.to_dict()} for t in tiling.tiles],
    }
    _write_json(out / "report.json", payload)
    print(f"{len(tiling.tiles)} tiles, ratio {tiling.ratio:.6f} ({cfg.mode})")
    return EXIT_OK


def cmd_grp_check(cfg, spec, out):
    tiling = _tiling(cfg, spec)
    rep = grp_check(tiling, cfg.c, tolerance=cfg.tolerance, n_samples=cfg.samples,
                    n_radii=cfg.radii, seed=cfg.seed,
                    substantiality_mode=cfg.substantiality)
    _write_json(out / "report.json", rep.to_dict())
    print(f"GRP overall={rep.overall} (i={rep.condition_i} ii={rep.condition_ii} "
          f"iii={rep.condition_iii}, {len(rep.point_contacts)} point contacts)")
    return EXIT_OK if rep.overall else EXIT_FAILED


def cmd_sep_dim(cfg, spec, out):
    sep = separation_set(_tiling(cfg, spec))
    if sep.is_empty:
        _write_json(out / "report.json", {"empty": True, "n_segments": 0})
        print("empty separation set: tiles share no interfaces")
        return EXIT_EMPTY
    est = box_counting_dimension(sep)
    _write_json(out / "report.json", est.to_dict() | {"empty": False})
    (out / "report.csv").write_text(est.to_csv())
    print(f"d_sep ~ {est.slope:.6f} (r2 {est.r2:.6f}, scales {est.j_range})")
    return EXIT_OK


def cmd_graph(cfg, spec, out):
    tiling = _tiling(cfg, spec)
    sep = separation_set(tiling)
    g = build_partition_graph(tiling, sep, cfg.c, cfg.substantiality)
    _write_json(out / "report.json", g.to_dict())
    (out / "graph.edges").write_text(g.to_edge_list())
    (out / "graph.dimacs").write_text(g.to_dimacs())
    print(f"{g.n} vertices, {len(g.edges)} edges, max degree {g.max_degree}")
    return EXIT_OK


def cmd_color(cfg, spec, out):
    tiling = _tiling(cfg, spec)
    g = build_partition_graph(tiling, separation_set(tiling), cfg.c, cfg.substantiality)
    if cfg.algorithm == "greedy":
        res = greedy_coloring(g)
    elif cfg.algorithm == "dsatur":
        res = dsatur_coloring(g)
    else:
        res = exact_chromatic(g, cfg.node_budget)
    _write_json(out / "report.json", res.to_dict())
    print(f"{cfg.algorithm}: {res.num_colors} colors, proper={res.is_proper}")
    return EXIT_OK if res.is_proper else EXIT_FAILED


def _analysis_kw(cfg):
    return dict(c=cfg.c, seed=cfg.seed, n_samples=cfg.samples, n_radii=cfg.radii,
                tolerance=cfg.tolerance, node_budget=cfg.node_budget,
                substantiality_mode=cfg.substantiality, cell_budget=cfg.cell_budget)


def cmd_verify(cfg, spec, out):
    an = analyze(spec, cfg.m, cfg.k, mode=cfg.mode,
                 d_sep_analytic=ANALYTIC_D_SEP.get(spec.name), **_analysis_kw(cfg))
    from .theorem import BoundReport

    report = BoundReport([an.row])
    theorem = report.theorem_ok(cfg.frozen_c)
    payload = report.to_dict() | {
        "theorem_ok": theorem,
        "frozen_c": cfg.frozen_c,
        "grp": an.grp.to_dict(),
        "coloring": an.coloring.to_dict(),
        "degree_bound_violations": an.degree_bound.violations,
        "packing": [{"degree": d, "count": n} for d, n in an.packing],
    }
    _write_json(out / "report.json", payload)
    (out / "report.csv").write_text(report.to_csv())
    packings = []
    if an.tiling.tiles:
        t = an.tiling.tiles[0]
        packings.append(packing_number(an.sep, t.metrics.center, t.metrics.r_max,
                                       cfg.c * t.metrics.r_min))
    scene = build_scene(an.tiling.fractal, an.tiling, an.sep, an.coloring, packings,
                        layers=cfg.layers, size=cfg.size)
    render_svg(scene, out / "scene.svg")
    r = an.row
    print(f"{spec.name} m={r.m} k={r.k}: chi={r.chi} Delta={r.max_degree} "
          f"ratio={r.ratio:.6f} d_sep={r.d_sep:.4f} brooks_ok={r.brooks_ok} "
          f"theorem_ok={all(theorem)}")
    return EXIT_OK if r.brooks_ok and all(theorem) else EXIT_FAILED


def cmd_sweep(cfg, spec, out):
    names = [x for x in cfg.presets.split(",") if x] or [None]
    m_list = [int(x) for x in cfg.m_list.split(",") if x]
    reports = []
    for name in names:
        s = spec if name is None else load_spec(name)
        reports.append(scaling_sweep(s, m_list, cfg.k_offset, modes=(cfg.mode,),
                                     jobs=cfg.jobs, d_sep_analytic=ANALYTIC_D_SEP.get(s.name),
                                     **{k: v for k, v in _analysis_kw(cfg).items() if k != "c"},
                                     c=cfg.c))
    report = merge_reports(reports)
    theorem = report.theorem_ok(cfg.frozen_c)
    payload = report.to_dict() | {"theorem_ok": theorem, "frozen_c": cfg.frozen_c}
    _write_json(out / "report.json", payload)
    (out / "report.csv").write_text(report.to_csv())
    errors = [r for r in report.rows if r.error]
    print(f"{len(report.rows)} rows, fitted C={report.fitted_c:.6f}, "
          f"brooks_ok={report.brooks_ok}, theorem_ok={all(theorem)}, "
          f"errors={len(errors)}")
    if not (report.brooks_ok and all(theorem)):
        return EXIT_FAILED
    if errors and all(math.isnan(r.ratio) for r in report.rows):
        return EXIT_BUDGET
    return EXIT_OK


def cmd_render(cfg, spec, out):
    tiling = _tiling(cfg, spec)
    sep = separation_set(tiling) if cfg.m >= 1 else None
    coloring = None
    packings = []
    if sep is not None:
        g = build_partition_graph(tiling, sep, cfg.c, cfg.substantiality)
        coloring = exact_chromatic(g, cfg.node_budget)
        t = tiling.tiles[0]
        packings.append(packing_number(sep, t.metrics.center, t.metrics.r_max,
                                       cfg.c * t.metrics.r_min))
    scene = build_scene(tiling.fractal, tiling, sep, coloring, packings,
                        layers=cfg.layers, size=cfg.size)
    path = render_svg(scene, out / "scene.svg")
    counts = ", ".join(f"{name}={scene.count(name)}" for name in scene.layers)
    print(f"wrote {path} ({counts})")
    return EXIT_OK


COMMANDS = {
    "spec": cmd_spec,
    "rasterize": cmd_rasterize,
    "partition": cmd_partition,
    "grp-check": cmd_grp_check,
    "sep-dim": cmd_sep_dim,
    "graph": cmd_graph,
    "color": cmd_color,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "render": cmd_render,
}


def run_command(argv) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())

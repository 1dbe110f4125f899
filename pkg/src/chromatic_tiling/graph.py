"""Tile interfaces, the substantiality edge rule, and graph coloring."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import BudgetExhausted
from .partition import Tiling
from .separation import SeparationSet

SUBSPACE_BALL = "subspace-ball"
DIAMETER = "diameter"


@dataclass(frozen=True)
class Interface:
    tiles: tuple[int, int]
    segments: np.ndarray
    points: np.ndarray
    diameter: float
    # half-unit coordinates of every segment endpoint and contact point
    support: np.ndarray = field(repr=False)

    @property
    def is_empty(self) -> bool:
        return len(self.segments) == 0 and len(self.points) == 0


def interface(tiling: Tiling, sep: SeparationSet, t_i: int, t_j: int) -> Interface:
    """Shared closure of two tiles, read off the separation set."""
    if t_i == t_j:
        raise ValueError("an interface needs two distinct tiles")
    pair = (min(t_i, t_j), max(t_i, t_j))
    segs, pts = sep.pair_index.get(pair, (np.zeros(0, np.int64),) * 2)
    support = np.concatenate([
        2 * sep.segment_ends()[segs].reshape(-1, 2),
        2 * sep.point_xy[pts],
    ]).astype(np.int64)
    if len(support) > 1:
        # 1-d keys are far cheaper to deduplicate than rows
        width = 2 * tiling.fractal.grid_size + 1
        keys = np.unique(support[:, 0] * width + support[:, 1])
        support = np.column_stack([keys // width, keys % width])
    else:
        support = support.reshape(-1, 2)
    diam = _diameter(support) / (2 * tiling.fractal.grid_size)
    return Interface(pair, segs, pts, diam, support)


def _diameter(points: np.ndarray) -> float:
    if len(points) < 2:
        return 0.0
    rel = points - points[0]
    if np.all(rel[:, 0] * rel[-1, 1] - rel[:, 1] * rel[-1, 0] == 0):
        # collinear (every interface between side-adjacent tiles is): the
        # lexicographic extremes are the farthest pair
        order = np.lexsort((points[:, 1], points[:, 0]))
        return float(math.dist(points[order[0]], points[order[-1]]))
    from scipy.spatial.distance import pdist

    return float(pdist(points.astype(float)).max())


def interface_substantial(iface: Interface, r_min: float, c: float,
                          sep: SeparationSet, mode: str = SUBSPACE_BALL) -> bool:
    """Does the interface contain a ball of radius ``c * r_min`` of the
    separation set?

    ``subspace-ball`` looks for a center among interface segment midpoints
    and endpoints (or its contact points) whose open ball meets only
    interface elements, at least two of them.  ``diameter`` compares the
    interface diameter with ``c * r_min``.
    """
    if iface.is_empty:
        return False
    if mode == DIAMETER:
        return iface.diameter >= c * r_min
    if mode != SUBSPACE_BALL:
        raise ValueError(f"unknown substantiality mode {mode!r}")

    unit = 2 * sep.tiling.fractal.grid_size
    rho = c * r_min * unit
    ends2 = 2 * sep.segment_ends()[iface.segments]
    cands = np.concatenate([ends2.reshape(-1, 2), ends2.sum(axis=1) // 2,
                            2 * sep.point_xy[iface.points]])
    width = unit + 1
    keys = np.unique(cands[:, 0] * width + cands[:, 1])
    cands = np.column_stack([keys // width, keys % width])
    # try the most central candidates first
    centroid = cands.mean(axis=0)
    order = np.lexsort((cands[:, 1], cands[:, 0], ((cands - centroid) ** 2).sum(axis=1)))
    cands = cands[order]

    n_seg = sep.n_segments
    i, j = iface.tiles
    all_ends2 = 2 * sep.segment_ends()
    for start in range(0, len(cands), 32):
        chunk = cands[start:start + 32]
        hits = sep.element_tree.query_ball_point(chunk, rho + 1.0)
        for p, idx in zip(chunk, hits):
            idx = np.asarray(idx, dtype=np.int64)
            segs = idx[idx < n_seg]
            pts = idx[idx >= n_seg] - n_seg
            d2_seg = _point_segment_d2(p, all_ends2[segs])
            d2_pt = ((2 * sep.point_xy[pts] - p) ** 2).sum(axis=1)
            in_seg = segs[d2_seg < rho * rho]
            in_pt = pts[d2_pt < rho * rho]
            if len(in_seg) + len(in_pt) < 2:
                continue
            if not (sep.seg_tiles[in_seg] == (i, j)).all():
                continue
            if all(i in sep.point_tiles[q] and j in sep.point_tiles[q] for q in in_pt):
                return True
    return False


def _point_segment_d2(p: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Squared distance from ``p`` to axis-parallel segments (half-units)."""
    lo = ends.min(axis=1)
    hi = ends.max(axis=1)
    nearest = np.clip(p, lo, hi)
    return ((nearest - p) ** 2).sum(axis=1)


@dataclass(frozen=True)
class PartitionGraph:
    vertices: tuple
    edges: tuple[tuple[int, int], ...]

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @property
    def degree_table(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    @property
    def max_degree(self) -> int:
        return max(self.degree_table, default=0)

    @classmethod
    def from_edges(cls, n: int, edges) -> "PartitionGraph":
        """Simple graph on ``0..n-1``; loops dropped, pairs normalized."""
        clean = sorted({(min(u, v), max(u, v)) for u, v in edges if u != v})
        return cls(tuple(range(n)), tuple(clean))

    def to_edge_list(self) -> str:
        lines = [f"p tiles {self.n} {len(self.edges)}"]
        lines += [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    def to_dimacs(self) -> str:
        lines = [f"p edge {self.n} {len(self.edges)}"]
        lines += [f"e {u + 1} {v + 1}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "vertices": [list(v) if isinstance(v, tuple) else v
                         for v in self.vertices],
            "edges": [list(e) for e in self.edges],
            "degree_table": list(self.degree_table),
            "max_degree": self.max_degree,
        }


def parse_edge_list(text: str) -> PartitionGraph:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0][:2] != ["p", "tiles"]:
        raise ValueError("edge list must start with 'p tiles <n> <m>'")
    n, m = int(lines[0][2]), int(lines[0][3])
    edges = [(int(u), int(v)) for u, v in lines[1:]]
    if len(edges) != m:
        raise ValueError(f"header announces {m} edges, found {len(edges)}")
    return PartitionGraph.from_edges(n, edges)


def build_partition_graph(tiling: Tiling, sep: SeparationSet, c: float = 0.5,
                          mode: str = SUBSPACE_BALL) -> PartitionGraph:
    r_min = tiling.r_min
    edges = []
    for i, j in sep.touching_pairs():
        if interface_substantial(interface(tiling, sep, i, j), r_min, c, sep, mode):
            edges.append((i, j))
    return PartitionGraph(tuple(t.id for t in tiling.tiles), tuple(edges))


@dataclass(frozen=True)
class ColoringResult:
    algorithm: str
    colors: tuple[int, ...]
    num_colors: int
    is_proper: bool
    optimal: bool | None = None
    nodes: int = 0
    lower_bound: int | None = None

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "colors": list(self.colors),
            "num_colors": self.num_colors,
            "is_proper": self.is_proper,
            "optimal": self.optimal,
            "nodes": self.nodes,
            "lower_bound": self.lower_bound,
        }


def is_proper_coloring(g: PartitionGraph, colors) -> bool:
    return len(colors) == g.n and all(colors[u] != colors[v] for u, v in g.edges)


def _result(g, algorithm, colors, **kw) -> ColoringResult:
    colors = tuple(int(x) for x in colors)
    return ColoringResult(algorithm, colors, len(set(colors)),
                          is_proper_coloring(g, colors), **kw)


def greedy_coloring(g: PartitionGraph, order=None) -> ColoringResult:
    """First-fit coloring along ``order`` (vertex index order by default)."""
    adj = g.adjacency
    colors = [-1] * g.n
    for v in (range(g.n) if order is None else order):
        used = {colors[u] for u in adj[v]}
        c = 0
        while c in used:
            c += 1
        colors[v] = c
    return _result(g, "greedy", colors)


def dsatur_coloring(g: PartitionGraph) -> ColoringResult:
    """Brelaz DSATUR: pick the vertex with most distinct neighbour colors,
    then highest degree, then lowest index."""
    adj = g.adjacency
    colors = [-1] * g.n
    seen: list[set[int]] = [set() for _ in range(g.n)]
    heap = [(0, -len(adj[v]), v) for v in range(g.n)]
    heapq.heapify(heap)
    while heap:
        neg_sat, neg_deg, v = heapq.heappop(heap)
        if colors[v] >= 0 or -neg_sat != len(seen[v]):
            continue
        c = 0
        while c in seen[v]:
            c += 1
        colors[v] = c
        for u in adj[v]:
            if colors[u] < 0 and c not in seen[u]:
                seen[u].add(c)
                heapq.heappush(heap, (-len(seen[u]), -len(adj[u]), u))
    return _result(g, "dsatur", colors)


def greedy_clique(g: PartitionGraph) -> list[int]:
    adj = [set(a) for a in g.adjacency]
    best: list[int] = []
    for v in sorted(range(g.n), key=lambda v: (-len(adj[v]), v)):
        clique = [v]
        for u in sorted(adj[v], key=lambda u: (-len(adj[u]), u)):
            if all(u in adj[w] for w in clique):
                clique.append(u)
        if len(clique) > len(best):
            best = clique
    return best


DEFAULT_VERTEX_LIMIT = 4096


def exact_chromatic(g: PartitionGraph, node_budget: int = 1_000_000,
                    vertex_limit: int = DEFAULT_VERTEX_LIMIT) -> ColoringResult:
    """Chromatic number by DSATUR-ordered backtracking.

    Tries ``k`` from the clique lower bound up to one below the DSATUR
    upper bound.  Raises :class:`BudgetExhausted` when the search tree grows
    past ``node_budget``.
    """
    if g.n > vertex_limit:
        raise ValueError(f"{g.n} vertices exceeds the exact-search limit {vertex_limit}")
    if g.n == 0:
        return ColoringResult("exact", (), 0, True, True, 0, 0)
    upper = dsatur_coloring(g)
    lower = max(len(greedy_clique(g)), 1)
    best = upper.colors
    nodes = 0
    adj = g.adjacency
    for k in range(lower, upper.num_colors):
        found, used = _k_color(adj, k, node_budget - nodes)
        nodes += used
        if found is None and nodes >= node_budget:
            raise BudgetExhausted(k, upper.num_colors,
                                  _result(g, "exact", best, optimal=False,
                                          nodes=nodes, lower_bound=k), nodes)
        if found is not None:
            return _result(g, "exact", found, optimal=True, nodes=nodes, lower_bound=k)
    return _result(g, "exact", best, optimal=True, nodes=nodes,
                   lower_bound=upper.num_colors)


def _k_color(adj, k, budget):
    """Backtracking search for a proper ``k``-coloring.

    Returns ``(colors or None, nodes used)``; stops early when the budget
    runs out.  New colors are opened one at a time to skip permutations.
    """
    n = len(adj)
    colors = [-1] * n
    # counts[v][c]: colored neighbours of v holding color c
    counts = [[0] * k for _ in range(n)]
    sat = [0] * n
    nodes = 0

    def assign(v, c, delta):
        colors[v] = c if delta > 0 else -1
        for u in adj[v]:
            before = counts[u][c]
            counts[u][c] += delta
            if before == 0 and delta > 0:
                sat[u] += 1
            elif counts[u][c] == 0 and delta < 0:
                sat[u] -= 1

    def pick():
        best, key = -1, None
        for v in range(n):
            if colors[v] < 0:
                kv = (sat[v], len(adj[v]), -v)
                if key is None or kv > key:
                    best, key = v, kv
        return best

    def search(n_colored, n_used):
        nonlocal nodes
        if n_colored == n:
            return True
        nodes += 1
        if nodes > budget:
            return False
        v = pick()
        for c in range(min(n_used + 1, k)):
            if counts[v][c]:
                continue
            assign(v, c, +1)
            if search(n_colored + 1, max(n_used, c + 1)):
                return True
            assign(v, c, -1)
            if nodes > budget:
                return False
        return False

    import sys

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * n + 100))
    try:
        ok = search(0, 0)
    finally:
        sys.setrecursionlimit(limit)
    return (list(colors) if ok else None), min(nodes, budget)

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from chromatic_tiling import (CellAddress, PartitionGraph, dsatur_coloring, exact_chromatic,
                              greedy_coloring, validate_spec)

from oracles import chromatic_number_brute
from properties import MAX_CELLS, check_case


@st.composite
def cases(draw):
    base = draw(st.integers(2, 4))
    cells = draw(st.sets(st.tuples(st.integers(0, base - 1), st.integers(0, base - 1)),
                         min_size=1))
    spec = validate_spec({"base": base, "mask": sorted(cells)})
    k_max = 1
    while spec.n_maps ** (k_max + 1) <= MAX_CELLS and base ** (k_max + 1) <= 64:
        k_max += 1
    k = draw(st.integers(1, min(k_max, 4)))
    m = draw(st.integers(0, k))
    return spec, m, k


@settings(max_examples=200, derandomize=True, deadline=None)
@given(cases())
def test_tiling_invariants(case):
    check_case(*case)


@st.composite
def small_graphs(draw):
    n = draw(st.integers(0, 10))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return PartitionGraph.from_edges(n, [p for p, k in zip(pairs, keep) if k])


@settings(max_examples=200, derandomize=True, deadline=None)
@given(small_graphs())
def test_exact_matches_brute_force(g):
    exact = exact_chromatic(g)
    assert exact.is_proper
    assert exact.num_colors == chromatic_number_brute(g.n, g.edges)
    assert exact.num_colors <= dsatur_coloring(g).num_colors
    assert exact.num_colors <= greedy_coloring(g).num_colors
    assert exact.num_colors <= g.max_degree + 1


@settings(max_examples=100, derandomize=True, deadline=None)
@given(small_graphs(), st.randoms(use_true_random=False))
def test_greedy_any_order_is_proper(g, rnd):
    order = list(range(g.n))
    rnd.shuffle(order)
    res = greedy_coloring(g, order)
    assert res.is_proper and res.num_colors <= g.max_degree + 1


@settings(max_examples=100, derandomize=True, deadline=None)
@given(st.integers(2, 6), st.integers(0, 3))
def test_address_round_trip(base, depth):
    n = base**depth
    for x, y in np.random.default_rng(base * 10 + depth).integers(0, n, (5, 2)).tolist():
        a = CellAddress.from_xy(x, y, depth, base)
        assert (a.x, a.y) == (x, y)

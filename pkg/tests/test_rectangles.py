import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cominfo.fixed_distance import FixedDistanceSpec, build_fixed_graph, hypercontractive_rect_upper
from cominfo.model import BipartiteGraph, ProfileTriple, Rectangle
from cominfo.rectangles import (
    SearchBudgetError,
    caps_from_triple,
    max_rect_exact,
    max_rect_greedy,
    profile_excluded,
    rect_edge_count,
    trivial_bounds,
)

G2 = build_fixed_graph(FixedDistanceSpec(2, 1))


def brute_max(g, a, b):
    """Every pair of subsets of size <= caps: independent of the degree-ranking shortcut."""
    m = g.dense()
    best = 0
    for ka in range(min(a, g.left_size) + 1):
        for A in combinations(range(g.left_size), ka):
            for kb in range(min(b, g.right_size) + 1):
                for B in combinations(range(g.right_size), kb):
                    best = max(best, int(m[np.ix_(A, B)].sum()) if A and B else 0)
    return best


@st.composite
def small_graphs(draw, max_side=5):
    r = draw(st.integers(1, max_side))
    c = draw(st.integers(1, max_side))
    mask = draw(arrays(bool, (r, c)))
    return BipartiteGraph.from_edges(r, c, np.argwhere(mask))


def test_rect_edge_count_examples():
    assert rect_edge_count(BipartiteGraph.complete(2, 2), Rectangle((0, 1), (0, 1))) == 4
    assert rect_edge_count(G2, Rectangle((0b00, 0b11), (0b01, 0b10))) == 4
    assert rect_edge_count(G2, Rectangle((), (0, 1))) == 0
    with pytest.raises(ValueError):
        rect_edge_count(G2, Rectangle((4,), (0,)))


def test_max_rect_exact_examples():
    assert max_rect_exact(G2, 2, 2).count == 4
    assert max_rect_exact(BipartiteGraph.complete(5, 4), 3, 2).count == 6
    g4 = build_fixed_graph(FixedDistanceSpec(4, 2))
    assert max_rect_exact(g4, 4, 4).count >= 12


def test_budget_error_names_size():
    g = build_fixed_graph(FixedDistanceSpec(6, 2))
    with pytest.raises(SearchBudgetError, match=str(math.comb(64, 32))):
        max_rect_exact(g, 32, 32, budget=1000)


def test_greedy_examples():
    assert max_rect_greedy(BipartiteGraph.complete(6, 5), 3, 4, seed=0).count == 12
    assert max_rect_greedy(G2, 2, 2, restarts=8, seed=0).count == 4


def test_greedy_sandwich_on_g10_4():
    spec = FixedDistanceSpec(10, 4)
    g = build_fixed_graph(spec)
    res = max_rect_greedy(g, 32, 32, restarts=8, seed=0)
    assert rect_edge_count(g, res.witness) == res.count
    # a 32-subset of the weight-2 sphere as a construction to beat
    c = [x for x in range(1 << 10) if bin(x).count("1") == 2][:32]
    assert res.count >= rect_edge_count(g, Rectangle(tuple(c), tuple(c)))
    assert res.count <= hypercontractive_rect_upper(spec, 32, 32)


@given(small_graphs(), st.integers(1, 4), st.integers(1, 4))
def test_exact_matches_brute_force(g, a, b):
    res = max_rect_exact(g, a, b)
    assert res.count == brute_max(g, a, b)
    assert rect_edge_count(g, res.witness) == res.count
    assert len(res.witness.left_set) <= a and len(res.witness.right_set) <= b


@given(small_graphs(), st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_greedy_below_exact(g, a, b, seed):
    greedy = max_rect_greedy(g, a, b, restarts=3, seed=seed)
    assert greedy.count <= max_rect_exact(g, a, b).count
    assert rect_edge_count(g, greedy.witness) == greedy.count
    assert greedy.mode == "heuristic"


@given(small_graphs(), st.integers(1, 3), st.integers(1, 3))
def test_monotone_in_caps(g, a, b):
    base = max_rect_exact(g, a, b).count
    assert max_rect_exact(g, a + 1, b).count >= base
    assert max_rect_exact(g, a, b + 1).count >= base


def test_results_independent_of_workers():
    g = build_fixed_graph(FixedDistanceSpec(6, 2))
    assert max_rect_greedy(g, 8, 8, 6, 3, workers=1) == max_rect_greedy(g, 8, 8, 6, 3, workers=4)
    assert max_rect_exact(g, 3, 64, workers=1).count == max_rect_exact(g, 3, 64, workers=4).count


def test_profile_excluded_examples():
    assert profile_excluded(G2, ProfileTriple(1, 1, 0), 4)
    assert not profile_excluded(G2, ProfileTriple(1, 1, 1), 4)
    g = build_fixed_graph(FixedDistanceSpec(4, 2))
    assert not profile_excluded(g, ProfileTriple(0, 0, np.log2(g.num_edges)), 1)


def test_trivial_bounds_examples():
    assert trivial_bounds(G2, ProfileTriple(0, 0, 3)) == "included"
    assert trivial_bounds(G2, ProfileTriple(0, 0, 2)) == "excluded"
    assert trivial_bounds(G2, ProfileTriple(2, 2, 0)) == "included"
    assert trivial_bounds(G2, ProfileTriple(1, 1, 1.5)) == "unknown"
    with pytest.raises(ValueError):
        trivial_bounds(BipartiteGraph.from_edges(2, 2, [(0, 0)]), ProfileTriple(1, 1, 1))


def test_caps_from_triple_floors():
    assert caps_from_triple(ProfileTriple(1.5, 0, 0)) == (2, 1)

"""Maximum edge count inside a size-bounded rectangle, and the profile tests built on it.

Caps are integer set sizes; a bit length ``alpha`` becomes the cap ``floor(2**alpha)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations, islice
from typing import Literal

import numpy as np

from .model import BipartiteGraph, ProfileTriple, Rectangle

DEFAULT_BUDGET = 10**8
CHUNK = 4096

Verdict = Literal["excluded", "included", "unknown"]


class SearchBudgetError(RuntimeError):
    def __init__(self, size: int, budget: int):
        super().__init__(f"exact search would enumerate {size} subsets, budget is {budget}")
        self.size = size
        self.budget = budget


@dataclass(frozen=True)
class RectMaxResult:
    count: int
    witness: Rectangle
    mode: Literal["exact", "heuristic"]

    def to_json(self) -> dict:
        return {"count": self.count, "witness": self.witness.to_json(), "mode": self.mode}


def caps_from_triple(t: ProfileTriple) -> tuple[int, int]:
    return math.floor(2.0**t.alpha), math.floor(2.0**t.beta)


def rect_edge_count(graph: BipartiteGraph, rect: Rectangle) -> int:
    if not rect.fits(graph):
        raise ValueError("rectangle has vertices outside the graph")
    if not rect.left_set or not rect.right_set:
        return 0
    return int(graph.adjacency[np.asarray(rect.left_set)][:, np.asarray(rect.right_set)].sum())


def _top(deg: np.ndarray, k: int) -> np.ndarray:
    # highest degree first, ties to the lowest index
    return np.sort(np.argsort(-deg, kind="stable")[:k])


def exact_search_size(graph: BipartiteGraph, a_cap: int, b_cap: int) -> int:
    a = min(a_cap, graph.left_size)
    b = min(b_cap, graph.right_size)
    return min(math.comb(graph.left_size, a), math.comb(graph.right_size, b))


def max_rect_exact(
    graph: BipartiteGraph, a_cap: int, b_cap: int, budget: int = DEFAULT_BUDGET, workers: int = 1
) -> RectMaxResult:
    """Optimal edge count over rectangles with ``|A| <= a_cap``, ``|B| <= b_cap``.

    Only the subsets of one side are enumerated (whichever side has fewer);
    the best partner set is then the ``cap`` opposite vertices of highest
    degree into the enumerated set.
    """
    a = min(a_cap, graph.left_size)
    b = min(b_cap, graph.right_size)
    if a <= 0 or b <= 0 or graph.num_edges == 0:
        return RectMaxResult(0, Rectangle((), ()), "exact")
    size = exact_search_size(graph, a, b)
    if size > budget:
        raise SearchBudgetError(size, budget)

    m = graph.dense()
    flip = math.comb(graph.right_size, b) < math.comb(graph.left_size, a)
    if flip:
        m, a, b = m.T, b, a
    m = np.ascontiguousarray(m)

    def scan(chunk):
        idx = np.asarray(chunk)
        deg = m[idx].sum(axis=1)
        counts = -np.sort(-deg, axis=1)[:, :b].sum(axis=1)
        i = int(np.argmax(counts))
        return int(counts[i]), idx[i]

    combos = combinations(range(m.shape[0]), a)
    chunks = iter(lambda: list(islice(combos, CHUNK)), [])
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(scan, chunks))
    else:
        results = [scan(c) for c in chunks]
    best, rows = max(results, key=lambda r: r[0])
    cols = _top(m[rows].sum(axis=0), b)
    left, right = (cols, rows) if flip else (rows, cols)
    return RectMaxResult(best, Rectangle(tuple(left), tuple(right)), "exact")


def max_rect_greedy(
    graph: BipartiteGraph, a_cap: int, b_cap: int, restarts: int = 8, seed=None, workers: int = 1
) -> RectMaxResult:
    """Alternating maximization from ``restarts`` starting sets; a lower bound on the optimum.

    Restart 0 starts from the highest-degree left vertices, the rest from
    random left sets. Each restart draws from its own spawned seed, so the
    result does not depend on ``workers``.
    """
    a = min(a_cap, graph.left_size)
    b = min(b_cap, graph.right_size)
    if a <= 0 or b <= 0 or graph.num_edges == 0:
        return RectMaxResult(0, Rectangle((), ()), "heuristic")
    adj = graph.adjacency
    adj_t = adj.T.tocsr()
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seeds = ss.spawn(max(restarts, 1))

    def run(r):
        if r == 0:
            A = _top(graph.left_degrees(), a)
        else:
            A = np.sort(np.random.default_rng(seeds[r]).choice(graph.left_size, a, replace=False))
        best = -1
        while True:
            B = _top(np.asarray(adj[A].sum(axis=0)).ravel(), b)
            deg = np.asarray(adj_t[B].sum(axis=0)).ravel()
            A_new = _top(deg, a)
            count = int(deg[A_new].sum())
            if count <= best:
                return best, A, B
            best, A = count, A_new

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, range(max(restarts, 1))))
    else:
        results = [run(r) for r in range(max(restarts, 1))]
    count, A, B = max(results, key=lambda r: r[0])
    return RectMaxResult(count, Rectangle(tuple(A), tuple(B)), "heuristic")


def profile_excluded(graph: BipartiteGraph, t: ProfileTriple, r_upper: float) -> bool:
    """True when ``2**gamma`` rectangles of at most ``r_upper`` edges each cannot cover E."""
    return r_upper * 2.0**t.gamma < graph.num_edges


def trivial_bounds(graph: BipartiteGraph, t: ProfileTriple) -> Verdict:
    """Verdict from the four counting bounds valid for graphs without isolated nodes."""
    if graph.has_isolated_nodes():
        raise ValueError("trivial bounds need a graph without isolated nodes")
    lx, ly = math.log2(graph.left_size), math.log2(graph.right_size)
    le = math.log2(graph.num_edges)
    al, be, ga = t
    if al + ga < lx or be + ga < ly or al + be + ga < le:
        return "excluded"
    if min(al, be) + ga >= le or al + be + ga >= lx + ly:
        return "included"
    return "unknown"

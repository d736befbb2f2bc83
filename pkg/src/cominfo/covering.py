"""Rectangle covers of a bipartite graph and the three-message codec they induce.

A complete cover by ``m`` rectangles of size at most ``2**alpha x 2**beta``
witnesses that ``(alpha, beta, ceil(log2 m))`` is in the profile: send the
rectangle number as the common message and the positions of ``x`` and ``y``
inside it as the private ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from .model import BipartiteGraph, Cover, ProfileTriple, Rectangle, rectangle_edge_ids
from .rectangles import rect_edge_count


class AutomorphismError(RuntimeError):
    """A sampled vertex map failed to preserve an edge."""


class NotAnEdgeError(KeyError):
    pass


class HypercubeSampler:
    """Maps ``x -> pi(x) XOR v`` on both sides, ``pi`` a random coordinate permutation.

    These preserve Hamming distance, so they are automorphisms of every
    fixed-distance graph on ``n``-bit strings, and they act transitively on its edges.
    """

    def __init__(self, n: int):
        if not 1 <= n <= 24:
            raise ValueError("n must lie in [1, 24]")
        self.n = n
        self._bits = (np.arange(1 << n)[:, None] >> np.arange(n)) & 1

    def sample(self, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        pi = rng.permutation(self.n)
        v = int(rng.integers(0, 1 << self.n))
        perm = (self._bits @ (1 << pi)) ^ v
        return perm, perm


class SymmetricSampler:
    """Independent uniform permutations of each side (automorphisms of a complete graph)."""

    def __init__(self, left_size: int, right_size: int):
        self.left_size = left_size
        self.right_size = right_size

    def sample(self, rng):
        return rng.permutation(self.left_size), rng.permutation(self.right_size)


def default_cover_size(num_edges: int, gamma: float) -> int:
    """``ceil(2**gamma * ln|E|)`` images, at least one."""
    return max(1, math.ceil(2.0**gamma * math.log(max(num_edges, 1))))


def _check_automorphism(graph, perm_l, perm_r, rng, k):
    if graph.num_edges == 0:
        return
    pick = graph.edges[rng.integers(0, graph.num_edges, size=k)]
    if (graph.edge_index(perm_l[pick[:, 0]], perm_r[pick[:, 1]]) < 0).any():
        raise AutomorphismError("sampled map does not preserve the edge set")


def random_cover(
    graph: BipartiteGraph,
    sampler,
    base: Rectangle,
    m: int | None = None,
    seed=None,
    gamma: float | None = None,
    spot_checks: int = 16,
) -> Cover:
    """Images of ``base`` under ``m`` independent random automorphisms.

    ``gamma`` defaults to ``log2(|E| / K)`` with ``K`` the edge count of
    ``base``, and ``m`` to ``ceil(2**gamma * ln|E|)``. Success is only
    probable; check ``is_complete()`` and retry with another seed.
    """
    k = rect_edge_count(graph, base)
    e = graph.num_edges
    if k == 0 and e > 0:
        raise ValueError("base rectangle contains no edges")
    if gamma is None:
        gamma = math.log2(e / k) if e else 0.0
    elif k * 2.0**gamma < e:
        raise ValueError(f"base has K={k} edges; K * 2**gamma = {k * 2.0**gamma:g} < |E| = {e}")
    if m is None:
        m = default_cover_size(e, gamma)
    rng = np.random.default_rng(seed)
    a = np.asarray(base.left_set, dtype=np.int64)
    b = np.asarray(base.right_set, dtype=np.int64)
    rects = []
    for _ in range(m):
        pl, pr = sampler.sample(rng)
        _check_automorphism(graph, pl, pr, rng, spot_checks)
        rects.append(Rectangle(tuple(pl[a]), tuple(pr[b])))
    return Cover(graph, tuple(rects))


def random_cover_success(graph, sampler, base, m=None, seeds=range(100), gamma=None) -> list[bool]:
    return [random_cover(graph, sampler, base, m, s, gamma).is_complete() for s in seeds]


def _pad(chosen: np.ndarray, size: int, cap: int) -> np.ndarray:
    target = min(cap, size)
    if len(chosen) >= target:
        return chosen
    free = np.setdiff1d(np.arange(size), chosen, assume_unique=True)
    return np.sort(np.concatenate([chosen, free[: target - len(chosen)]]))


def greedy_cover(graph: BipartiteGraph, a_cap: int, b_cap: int) -> Cover:
    """Cover E by rectangles spanned by ``min(a_cap, b_cap)`` uncovered edges at a time.

    Each rectangle covers at least that many new edges, so at most
    ``ceil(|E| / min(a_cap, b_cap))`` rectangles are used. Under-full sides are
    padded with the lowest-index unused vertices.
    """
    s = min(a_cap, b_cap)
    if s < 1:
        raise ValueError("caps must be positive")
    covered = np.zeros(graph.num_edges, dtype=bool)
    rects = []
    ptr = 0
    while ptr < graph.num_edges:
        todo = np.flatnonzero(~covered[ptr:])
        if not len(todo):
            break
        ptr += int(todo[0])
        pick = graph.edges[ptr + todo[:s] - todo[0]]
        a = _pad(np.unique(pick[:, 0]), graph.left_size, a_cap)
        b = _pad(np.unique(pick[:, 1]), graph.right_size, b_cap)
        rect = Rectangle(tuple(a), tuple(b))
        covered[rectangle_edge_ids(graph, rect)] = True
        rects.append(rect)
    return Cover(graph, tuple(rects), a_cap, b_cap)


def clog2(k: int) -> int:
    """Bits needed to index ``k`` items."""
    return (k - 1).bit_length() if k > 1 else 0


@dataclass(frozen=True, eq=False)
class Codec:
    """Encoder/decoder for edges of ``cover.graph`` via the rectangles of ``cover``.

    ``encode(x, y) = (a, b, c)`` with ``c`` the first rectangle containing the
    edge and ``a``, ``b`` the positions of ``x``, ``y`` inside it.
    """

    cover: Cover
    assignment: np.ndarray
    alpha: int
    beta: int
    gamma: int
    f_table: np.ndarray
    g_table: np.ndarray

    def encode(self, x: int, y: int) -> tuple[int, int, int]:
        i = int(self.cover.graph.edge_index([x], [y])[0])
        if i < 0:
            raise NotAnEdgeError(f"({x}, {y}) is not an edge")
        c = int(self.assignment[i])
        if c < 0:
            raise NotAnEdgeError(f"({x}, {y}) is not covered")
        r = self.cover.rectangles[c]
        return r.left_set.index(x), r.right_set.index(y), c

    def encode_all(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(a, b, c)`` arrays for every edge, in ``graph.edges`` order."""
        c = self.assignment
        edges = self.cover.graph.edges
        a = np.empty_like(c)
        b = np.empty_like(c)
        order = np.argsort(c, kind="stable")
        bounds = np.searchsorted(c[order], np.arange(len(self.cover.rectangles) + 1))
        for i, r in enumerate(self.cover.rectangles):
            sel = order[bounds[i] : bounds[i + 1]]
            if len(sel):
                a[sel] = np.searchsorted(r.left_set, edges[sel, 0])
                b[sel] = np.searchsorted(r.right_set, edges[sel, 1])
        return a, b, c

    def decode_x(self, a: int, c: int) -> int:
        return int(self.f_table[c, a])

    def decode_y(self, b: int, c: int) -> int:
        return int(self.g_table[c, b])

    def decode(self, a: int, b: int, c: int) -> tuple[int, int]:
        return self.decode_x(a, c), self.decode_y(b, c)

    def encode_bits(self, x: int, y: int) -> tuple[str, str, str]:
        a, b, c = self.encode(x, y)
        fmt = lambda v, w: format(v, f"0{w}b") if w else ""
        return fmt(a, self.alpha), fmt(b, self.beta), fmt(c, self.gamma)

    @property
    def triple(self) -> ProfileTriple:
        return ProfileTriple(self.alpha, self.beta, self.gamma)


def _tables(rects, width_bits, side):
    m = max(len(rects), 1)
    table = np.zeros((m, 1 << width_bits), dtype=np.int64)
    for c, r in enumerate(rects):
        s = np.asarray(getattr(r, side), dtype=np.int64)
        if len(s):
            table[c, :] = s[0]
            table[c, : len(s)] = s
    return table


def codec_from_cover(cover: Cover) -> Codec:
    rects = cover.rectangles
    assignment = np.full(cover.graph.num_edges, -1, dtype=np.int64)
    for c, r in enumerate(rects):
        ids = rectangle_edge_ids(cover.graph, r)
        ids = ids[assignment[ids] < 0]
        assignment[ids] = c
    if (assignment < 0).any():
        raise ValueError(f"cover is incomplete: {(assignment < 0).sum()} edges uncovered")
    alpha = clog2(max((len(r.left_set) for r in rects), default=0))
    beta = clog2(max((len(r.right_set) for r in rects), default=0))
    gamma = clog2(len(rects))
    return Codec(cover, assignment, alpha, beta, gamma, _tables(rects, alpha, "left_set"), _tables(rects, beta, "right_set"))


def verify_witness(graph: BipartiteGraph, cover: Cover) -> ProfileTriple:
    """Check the profile definition for the triple realized by a complete cover.

    Builds ``f(a, c)`` and ``g(b, c)`` as lookup tables and confirms that every
    edge ``(x, y)`` has ``a, b, c`` with ``f(a, c) = x`` and ``g(b, c) = y``.
    """
    if cover.graph is not graph and cover.graph.edge_set() != graph.edge_set():
        raise ValueError("cover belongs to a different graph")
    codec = codec_from_cover(Cover(graph, cover.rectangles))
    if graph.num_edges:
        a, b, c = codec.encode_all()
        xs, ys = graph.edges[:, 0], graph.edges[:, 1]
        if not ((codec.f_table[c, a] == xs).all() and (codec.g_table[c, b] == ys).all()):
            raise AssertionError("decoder tables do not reproduce every edge")
    return codec.triple


def union_bound_membership(graph: BipartiteGraph, a_cap: int, b_cap: int, r_lower: int) -> ProfileTriple:
    """Triple guaranteed for an edge-transitive graph holding a ``K``-edge rectangle.

    ``(log2 a_cap, log2 b_cap, log2(|E| / K) + log2 ln|E|)``; the last term is
    clamped at 0 for graphs with fewer than 3 edges. Edge-transitivity is the
    caller's assertion and is not checked.
    """
    if r_lower <= 0:
        raise ValueError("K must be positive")
    e = graph.num_edges
    gamma = math.log2(e / r_lower) + math.log2(math.log(e)) if e > 1 else 0.0
    return ProfileTriple(math.log2(a_cap), math.log2(b_cap), max(gamma, 0.0))


def _candidate_masks(graph: BipartiteGraph, a_cap: int, b_cap: int) -> list[int]:
    """Edge sets (as bitmasks over cells) of the maximal ``a_cap x b_cap`` rectangles."""
    m = graph.dense()
    r = graph.right_size
    cells = [[(1 << (x * r + y)) if m[x, y] else 0 for y in range(r)] for x in range(graph.left_size)]
    a = min(a_cap, graph.left_size)
    b = min(b_cap, graph.right_size)
    masks = set()
    for B in combinations(range(r), b):
        rows = [sum(row[y] for y in B) for row in cells]
        for A in combinations(range(graph.left_size), a):
            masks.add(sum(rows[x] for x in A))
    masks.discard(0)
    maximal = []
    for v in sorted(masks, key=lambda v: -v.bit_count()):
        if not any(v & w == v for w in maximal):
            maximal.append(v)
    return maximal


def exhaustive_cover_exists(graph: BipartiteGraph, a_cap: int, b_cap: int, k: int, budget: int = 10**6) -> bool:
    """Decide by search whether ``k`` rectangles of size ``a_cap x b_cap`` cover E.

    Intended for graphs of a few dozen cells; raises when the number of
    candidate rectangles exceeds ``budget``.
    """
    if graph.num_edges == 0:
        return True
    if k <= 0 or a_cap <= 0 or b_cap <= 0:
        return False
    a = min(a_cap, graph.left_size)
    b = min(b_cap, graph.right_size)
    if math.comb(graph.left_size, a) * math.comb(graph.right_size, b) > budget:
        raise RuntimeError("too many candidate rectangles for exhaustive cover search")
    cands = _candidate_masks(graph, a_cap, b_cap)
    biggest = cands[0].bit_count() if cands else 0
    full = sum(1 << int(i) for i in graph.edges[:, 0] * graph.right_size + graph.edges[:, 1])
    seen = set()

    def search(rest: int, left: int) -> bool:
        if rest == 0:
            return True
        if left == 0 or rest.bit_count() > left * biggest or (rest, left) in seen:
            return False
        low = rest & -rest
        for c in cands:
            if c & low and search(rest & ~c, left - 1):
                return True
        seen.add((rest, left))
        return False

    return search(full, k)


def min_cover_size(graph: BipartiteGraph, a_cap: int, b_cap: int, budget: int = 10**6) -> int:
    """Fewest ``a_cap x b_cap`` rectangles covering E, as a 0/1 program solved by HiGHS.

    Only maximal candidate rectangles are offered, which loses nothing: any
    cover can be enlarged rectangle by rectangle to one made of maximal ones.
    """
    if graph.num_edges == 0:
        return 0
    a = min(a_cap, graph.left_size)
    b = min(b_cap, graph.right_size)
    if a <= 0 or b <= 0:
        raise ValueError("caps must be positive")
    if math.comb(graph.left_size, a) * math.comb(graph.right_size, b) > budget:
        raise RuntimeError("too many candidate rectangles for the covering program")
    cands = _candidate_masks(graph, a, b)
    cells = graph.edges[:, 0] * graph.right_size + graph.edges[:, 1]
    A = np.array([[(c >> int(i)) & 1 for c in cands] for i in cells], dtype=float)
    res = milp(
        np.ones(len(cands)),
        constraints=LinearConstraint(A, lb=1.0),
        integrality=np.ones(len(cands)),
        bounds=Bounds(0, 1),
    )
    if not res.success:
        raise RuntimeError(f"covering program failed: {res.message}")
    return int(round(res.fun))

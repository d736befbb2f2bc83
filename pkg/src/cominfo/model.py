"""Shared domain types: bipartite graphs, joint distributions, rectangles, covers.

Vertices are dense integer indices. For Hamming-cube graphs a vertex is the
integer encoding of its bit string, so distances are ``popcount(x ^ y)``.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

log = logging.getLogger(__name__)

PROB_TOL = 1e-9


class GraphFormatError(ValueError):
    """Malformed graph file or out-of-range vertex."""


class DistributionError(ValueError):
    """Invalid joint distribution (negative mass, bad total, empty marginal)."""


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Edge set ``E`` inside ``X x Y`` with ``X = range(left_size)``, ``Y = range(right_size)``.

    ``edges`` is an ``(m, 2)`` int64 array, sorted lexicographically, without
    duplicates. Use :meth:`from_edges` to build one from arbitrary pairs.
    """

    left_size: int
    right_size: int
    edges: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @classmethod
    def from_edges(cls, left_size: int, right_size: int, pairs, *, return_duplicates=False):
        if left_size < 0 or right_size < 0:
            raise GraphFormatError("vertex counts must be nonnegative")
        arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if arr.size:
            bad = (arr[:, 0] < 0) | (arr[:, 0] >= left_size) | (arr[:, 1] < 0) | (arr[:, 1] >= right_size)
            if bad.any():
                x, y = arr[np.argmax(bad)]
                raise GraphFormatError(f"edge ({x}, {y}) out of range for {left_size}x{right_size} graph")
        keys = np.unique(arr[:, 0] * right_size + arr[:, 1]) if arr.size else np.zeros(0, np.int64)
        dup = len(arr) - len(keys)
        edges = np.stack([keys // max(right_size, 1), keys % max(right_size, 1)], axis=1)
        g = cls(left_size, right_size, edges)
        return (g, dup) if return_duplicates else g

    @classmethod
    def complete(cls, a: int, b: int) -> "BipartiteGraph":
        xs, ys = np.meshgrid(np.arange(a), np.arange(b), indexing="ij")
        return cls.from_edges(a, b, np.stack([xs.ravel(), ys.ravel()], axis=1))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def keys(self) -> np.ndarray:
        """Sorted linear edge ids ``x * right_size + y``."""
        return self.edges[:, 0] * self.right_size + self.edges[:, 1]

    @cached_property
    def adjacency(self) -> sparse.csr_array:
        data = np.ones(self.num_edges, dtype=np.int32)
        return sparse.csr_array(
            (data, (self.edges[:, 0], self.edges[:, 1])), shape=(self.left_size, self.right_size)
        )

    def dense(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (small graphs only)."""
        if self.left_size * self.right_size > 1 << 26:
            raise MemoryError("graph too large for a dense adjacency matrix")
        m = np.zeros((self.left_size, self.right_size), dtype=np.int32)
        m[self.edges[:, 0], self.edges[:, 1]] = 1
        return m

    def has_edge(self, x: int, y: int) -> bool:
        k = x * self.right_size + y
        i = np.searchsorted(self.keys, k)
        return bool(i < len(self.keys) and self.keys[i] == k)

    def edge_index(self, xs, ys) -> np.ndarray:
        """Positions of the given pairs in ``edges``; ``-1`` for non-edges."""
        k = np.asarray(xs, dtype=np.int64) * self.right_size + np.asarray(ys, dtype=np.int64)
        i = np.searchsorted(self.keys, k)
        i_clip = np.minimum(i, max(len(self.keys) - 1, 0))
        hit = (i < len(self.keys)) & (self.keys[i_clip] == k) if len(self.keys) else np.zeros(k.shape, bool)
        return np.where(hit, i_clip, -1)

    def left_degrees(self) -> np.ndarray:
        return np.bincount(self.edges[:, 0], minlength=self.left_size)

    def right_degrees(self) -> np.ndarray:
        return np.bincount(self.edges[:, 1], minlength=self.right_size)

    def has_isolated_nodes(self) -> bool:
        return bool((self.left_degrees() == 0).any() or (self.right_degrees() == 0).any())

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(x), int(y)) for x, y in self.edges}


def save_graph(graph: BipartiteGraph, path) -> None:
    lines = [f"{graph.left_size} {graph.right_size}"]
    lines += [f"{x} {y}" for x, y in graph.edges]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_graph(text: str) -> BipartiteGraph:
    header = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: expected two integers, got {raw!r}") from None
        if header is None:
            if a < 0 or b < 0:
                raise GraphFormatError(f"line {lineno}: negative vertex count")
            header = (a, b)
            continue
        if not (0 <= a < header[0] and 0 <= b < header[1]):
            raise GraphFormatError(f"line {lineno}: edge ({a}, {b}) out of range for {header[0]}x{header[1]} graph")
        pairs.append((a, b))
    if header is None:
        raise GraphFormatError("missing '|X| |Y|' header line")
    graph, dup = BipartiteGraph.from_edges(*header, pairs, return_duplicates=True)
    if dup:
        log.warning("collapsed %d duplicate edges", dup)
    return graph


def load_graph(path) -> BipartiteGraph:
    return parse_graph(Path(path).read_text())


def graph_from_spec(spec: str) -> BipartiteGraph:
    """Resolve ``fixed:n=<n>,d=<d>``, ``complete:<a>x<b>`` or a graph file path."""
    if spec.startswith("fixed:"):
        from .fixed_distance import FixedDistanceSpec, build_fixed_graph

        params = dict(kv.split("=", 1) for kv in spec[len("fixed:"):].split(","))
        return build_fixed_graph(FixedDistanceSpec(int(params["n"]), int(params["d"])))
    if spec.startswith("complete:"):
        a, b = spec[len("complete:"):].lower().split("x")
        return BipartiteGraph.complete(int(a), int(b))
    return load_graph(spec)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probability matrix over ``X x Y`` with full-support marginals."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64)
        if p.ndim != 2 or 0 in p.shape:
            raise DistributionError("probs must be a nonempty 2-d matrix")
        if not np.isfinite(p).all():
            raise DistributionError("probs contains non-finite entries")
        if (p < 0).any():
            i, j = np.argwhere(p < 0)[0]
            raise DistributionError(f"negative probability at ({i}, {j})")
        total = p.sum()
        if abs(total - 1.0) > PROB_TOL:
            raise DistributionError(f"probabilities sum to {total!r}, not 1")
        mx, my = p.sum(axis=1), p.sum(axis=0)
        if (mx == 0).any():
            raise DistributionError(f"zero marginal for row(s) {np.flatnonzero(mx == 0).tolist()}")
        if (my == 0).any():
            raise DistributionError(f"zero marginal for column(s) {np.flatnonzero(my == 0).tolist()}")
        p.setflags(write=False)
        mx.setflags(write=False)
        my.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "marginal_x", mx)
        object.__setattr__(self, "marginal_y", my)

    @property
    def shape(self) -> tuple[int, int]:
        return self.probs.shape

    @cached_property
    def transition(self) -> np.ndarray:
        """Row-stochastic matrix ``D(x, y) / D_X(x)``."""
        return self.probs / self.marginal_x[:, None]

    def support_graph(self) -> BipartiteGraph:
        return BipartiteGraph.from_edges(*self.shape, np.argwhere(self.probs > 0))

    @classmethod
    def product(cls, px, py) -> "JointDistribution":
        return cls(np.outer(px, py))

    @classmethod
    def identity(cls, k: int) -> "JointDistribution":
        return cls(np.eye(k) / k)


def load_distribution(path) -> JointDistribution:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DistributionError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or "probs" not in obj:
        raise DistributionError("expected an object with a 'probs' field")
    return JointDistribution(obj["probs"])


def save_distribution(dist: JointDistribution, path) -> None:
    Path(path).write_text(json.dumps({"probs": dist.probs.tolist()}))


def degenerate_check(dist: JointDistribution) -> bool:
    """True iff the support of ``dist`` is a disconnected bipartite graph."""
    a, b = dist.shape
    sup = sparse.csr_array(dist.probs > 0)
    block = sparse.block_array([[None, sup], [sup.T, None]], format="csr", dtype=np.int8)
    ncomp, _ = connected_components(block, directed=False)
    return ncomp > 1


@dataclass(frozen=True)
class Rectangle:
    """Combinatorial rectangle ``left_set x right_set``."""

    left_set: tuple[int, ...]
    right_set: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "left_set", tuple(sorted({int(v) for v in self.left_set})))
        object.__setattr__(self, "right_set", tuple(sorted({int(v) for v in self.right_set})))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.left_set), len(self.right_set)

    def fits(self, graph: BipartiteGraph) -> bool:
        ok_l = not self.left_set or (self.left_set[0] >= 0 and self.left_set[-1] < graph.left_size)
        ok_r = not self.right_set or (self.right_set[0] >= 0 and self.right_set[-1] < graph.right_size)
        return ok_l and ok_r

    def to_json(self) -> dict:
        return {"left": list(self.left_set), "right": list(self.right_set)}

    @classmethod
    def from_json(cls, obj) -> "Rectangle":
        return cls(tuple(obj["left"]), tuple(obj["right"]))


@dataclass(frozen=True)
class ProfileTriple:
    """Message lengths ``(alpha, beta, gamma)`` in bits."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {v!r}")

    def __iter__(self):
        return iter((self.alpha, self.beta, self.gamma))


def rectangle_edge_ids(graph: BipartiteGraph, rect: Rectangle) -> np.ndarray:
    """Indices into ``graph.edges`` of the edges lying inside ``rect``."""
    if not rect.left_set or not rect.right_set or graph.num_edges == 0:
        return np.zeros(0, dtype=np.int64)
    a = np.asarray(rect.left_set)
    b = np.asarray(rect.right_set)
    sub = graph.adjacency[a][:, b].tocoo()
    return graph.edge_index(a[sub.row], b[sub.col])


@dataclass(frozen=True, eq=False)
class Cover:
    """Ordered list of rectangles meant to cover the edges of ``graph``."""

    graph: BipartiteGraph
    rectangles: tuple[Rectangle, ...] = field(default_factory=tuple)
    a_cap: int | None = None
    b_cap: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "rectangles", tuple(self.rectangles))
        for i, r in enumerate(self.rectangles):
            if not r.fits(self.graph):
                raise ValueError(f"rectangle {i} has vertices outside the graph")
            if self.a_cap is not None and len(r.left_set) > self.a_cap:
                raise ValueError(f"rectangle {i} has {len(r.left_set)} left vertices > cap {self.a_cap}")
            if self.b_cap is not None and len(r.right_set) > self.b_cap:
                raise ValueError(f"rectangle {i} has {len(r.right_set)} right vertices > cap {self.b_cap}")

    def __len__(self):
        return len(self.rectangles)

    @cached_property
    def coverage(self) -> np.ndarray:
        """Boolean mask over ``graph.edges``: covered by some rectangle."""
        mask = np.zeros(self.graph.num_edges, dtype=bool)
        for r in self.rectangles:
            mask[rectangle_edge_ids(self.graph, r)] = True
        return mask

    def is_complete(self) -> bool:
        return bool(self.coverage.all())

    def uncovered_edges(self) -> np.ndarray:
        return self.graph.edges[~self.coverage]

    def to_json(self) -> dict:
        return {
            "left_size": self.graph.left_size,
            "right_size": self.graph.right_size,
            "rectangles": [r.to_json() for r in self.rectangles],
        }


def save_cover(cover: Cover, path) -> None:
    Path(path).write_text(json.dumps(cover.to_json()))


def load_cover(path, graph: BipartiteGraph) -> Cover:
    obj = json.loads(Path(path).read_text())
    rects = obj["rectangles"] if isinstance(obj, dict) else obj
    return Cover(graph, tuple(Rectangle.from_json(r) for r in rects))


def popcount(a) -> np.ndarray:
    return np.bitwise_count(np.asarray(a, dtype=np.uint64)).astype(np.int64)

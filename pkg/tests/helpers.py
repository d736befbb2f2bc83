"""Random instances shared by the test modules."""

import numpy as np

from cominfo.model import BipartiteGraph, JointDistribution


def random_graph(rng, left, right, p=0.5) -> BipartiteGraph:
    return BipartiteGraph.from_edges(left, right, np.argwhere(rng.random((left, right)) < p))


def random_distribution(rng, shape, support=None) -> JointDistribution:
    w = rng.uniform(0.1, 1.0, size=shape)
    if support is not None:
        w = w * support
    return JointDistribution(w / w.sum())


def random_support(rng, shape, p=0.6) -> np.ndarray:
    """0/1 mask with at least one entry in every row and column."""
    while True:
        m = rng.random(shape) < p
        if m.any(axis=0).all() and m.any(axis=1).all():
            return m.astype(float)


def block_degenerate(rng, shape) -> JointDistribution:
    """Distribution whose support splits into two blocks, rows and columns shuffled."""
    r, c = shape
    i, j = rng.integers(1, r), rng.integers(1, c)
    mask = np.zeros(shape)
    mask[:i, :j] = 1
    mask[i:, j:] = 1
    mask = mask[rng.permutation(r)][:, rng.permutation(c)]
    return random_distribution(rng, shape, mask)


def components_bfs(probs):
    """Plain BFS component count of the support graph (left i -> node i, right j -> node r + j)."""
    r, c = probs.shape
    adj = {v: set() for v in range(r + c)}
    for i, j in zip(*np.nonzero(probs > 0)):
        adj[i].add(r + j)
        adj[r + j].add(i)
    seen, comps = set(), 0
    for v in adj:
        if v in seen:
            continue
        comps += 1
        stack = [v]
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(adj[u] - seen)
    return comps

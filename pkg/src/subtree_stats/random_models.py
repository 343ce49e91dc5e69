"""Seeded samplers: G(n, p), uniform labelled trees and uniform spanning trees.

All randomness comes from numpy's PCG64 bit generator seeded with a 64-bit
value.  Per-trial seeds are derived from a master seed with the splitmix64
finaliser, so a trial's stream depends only on ``(master, index)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import MAX_VERTICES, Graph, GraphError, is_connected
from .trees import LabelledTree, prufer_decode

GENERATOR_ID = f"numpy-{np.__version__.split('.')[0]}.PCG64/splitmix64"
MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Seed:
    value: int
    generator: str = GENERATOR_ID

    def __post_init__(self):
        if not 0 <= self.value <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit value")

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.value))


def as_seed(seed) -> Seed:
    return seed if isinstance(seed, Seed) else Seed(int(seed) & MASK64)


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(master, index: int) -> Seed:
    """Seed of trial ``index``: ``splitmix64(splitmix64(master) + index)``.

    splitmix64 is a bijection on 64-bit words, so distinct indices under the
    same master never collide.
    """
    if index < 0:
        raise ValueError("trial index must be nonnegative")
    master = as_seed(master)
    return Seed(splitmix64((splitmix64(master.value) + index) & MASK64), master.generator)


@dataclass(frozen=True)
class GnpParams:
    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")


def gnp_edge_array(params: GnpParams, seed) -> np.ndarray:
    """Edges of a G(n, p) sample as an ``(m, 2)`` array, any ``n``.

    One uniform is drawn per pair in lexicographic order (0,1), (0,2), ...,
    (n-2, n-1); the edge is present when the uniform is below ``p``.
    """
    n = params.n
    rng = as_seed(seed).rng()
    rows, cols = np.triu_indices(n, k=1)
    keep = rng.random(rows.shape[0]) < params.p
    return np.stack([rows[keep], cols[keep]], axis=1)


def sample_gnp(params: GnpParams, seed) -> Graph:
    if params.n > MAX_VERTICES:
        raise GraphError(f"Graph holds at most {MAX_VERTICES} vertices; use gnp_edge_array")
    edges = gnp_edge_array(params, seed)
    adj = [0] * params.n
    for u, v in edges.tolist():
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return Graph(params.n, tuple(adj), len(edges))


def sample_uniform_labelled_tree(n: int, seed) -> LabelledTree:
    """Uniform labelled tree via a uniform Pruefer sequence."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = as_seed(seed).rng()
    return prufer_decode(rng.integers(0, n, size=n - 2).tolist(), n)


def wilson_parents(nbrs, rng: np.random.Generator) -> list[int]:
    """Parent array (root 0) of a uniform spanning tree from neighbour lists.

    The graph must be connected; vertices are started in increasing order.
    """
    n = len(nbrs)
    in_tree = [False] * n
    in_tree[0] = True
    nxt = [-1] * n
    for start in range(1, n):
        u = start
        while not in_tree[u]:
            nb = nbrs[u]
            nxt[u] = nb[int(rng.integers(len(nb)))]
            u = nxt[u]
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            u = nxt[u]
    return nxt


def sample_uniform_spanning_tree(g: Graph, seed) -> LabelledTree:
    """Wilson's loop-erased random walk, rooted at vertex 0."""
    if g.n < 1:
        raise GraphError("empty graph has no spanning tree")
    if not is_connected(g):
        raise GraphError("graph is disconnected")
    nxt = wilson_parents([g.neighbors(v) for v in range(g.n)], as_seed(seed).rng())
    return LabelledTree.from_edges(g.n, [(v, nxt[v]) for v in range(1, g.n)])


def clogn_p(n: int, c: float) -> float:
    return min(1.0, c * math.log(n) / n)


def csqrt_p(n: int, c: float) -> float:
    return min(1.0, c / math.sqrt(n))

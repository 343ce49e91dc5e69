"""Exact tools for labelled trees and rooted forests."""

from __future__ import annotations

import heapq
import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .counting import Census


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class LabelledTree:
    """Tree on ``0..n-1``; ``parent`` is taken with respect to root 0 (root has -1)."""

    n: int
    edges: tuple[tuple[int, int], ...]
    parent: tuple[int, ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "LabelledTree":
        edges = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
        if n < 1:
            raise TreeError("a tree needs at least one vertex")
        if len(edges) != n - 1:
            raise TreeError(f"a tree on {n} vertices has {n - 1} edges, got {len(edges)}")
        nbrs = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise TreeError(f"bad edge ({u}, {v})")
            nbrs[u].append(v)
            nbrs[v].append(u)
        parent = [-2] * n
        parent[0] = -1
        stack = [0]
        while stack:
            u = stack.pop()
            for v in nbrs[u]:
                if parent[v] == -2:
                    parent[v] = u
                    stack.append(v)
        if -2 in parent:
            raise TreeError("edges do not form a connected tree")
        return cls(n, edges, tuple(parent))

    @classmethod
    def from_parents(cls, parent: Sequence[int]) -> "LabelledTree":
        n = len(parent)
        roots = [v for v, p in enumerate(parent) if p < 0]
        if len(roots) != 1:
            raise TreeError("parent array must have exactly one root")
        return cls.from_edges(n, [(v, p) for v, p in enumerate(parent) if p >= 0])

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def children(self) -> list[list[int]]:
        ch = [[] for _ in range(self.n)]
        for v, p in enumerate(self.parent):
            if p >= 0:
                ch[p].append(v)
        return ch

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "parent": list(self.parent)})

    @classmethod
    def from_json(cls, text: str) -> "LabelledTree":
        return cls.from_parents(json.loads(text)["parent"])


def _postorder(t: LabelledTree) -> list[int]:
    ch = t.children()
    order, stack = [], [0]
    while stack:
        u = stack.pop()
        order.append(u)
        stack.extend(ch[u])
    order.reverse()
    return order


def tree_subtree_polynomial(t: LabelledTree) -> Census:
    """Census of a tree in O(n^2).

    ``f[v][j]`` counts subtrees with ``j`` vertices whose vertex nearest the root
    is ``v``; it is ``x * prod(1 + f[child])`` truncated to the branch size.
    Summing ``f[v]`` over all ``v`` counts every subtree once.
    """
    ch = t.children()
    f: list[list[int]] = [[] for _ in range(t.n)]
    counts = [0] * (t.n + 1)
    for v in _postorder(t):
        poly = [0, 1]
        for c in ch[v]:
            fc = f[c]
            grown = [0] * (len(poly) + len(fc) - 1)
            for i, a in enumerate(poly):
                if not a:
                    continue
                grown[i] += a
                for j in range(1, len(fc)):
                    grown[i + j] += a * fc[j]
            poly = grown
            f[c] = []  # release child table
        f[v] = poly
        for j in range(1, len(poly)):
            counts[j] += poly[j]
    return Census(t.n, tuple(counts[1:]))


def leaf_count(t: LabelledTree) -> int:
    if t.n < 2:
        warnings.warn("single-vertex tree: leaf count taken as 0", stacklevel=2)
        return 0
    return sum(1 for d in t.degrees() if d == 1)


def leaf_sandwich_check(t: LabelledTree, k: int, census: Census | None = None):
    """``(C(l, k), s_{n-k}(T), C(l+k-1, k), holds)`` where ``l`` is the leaf count."""
    if not 0 <= k <= t.n - 1:
        raise ValueError(f"k must lie in 0..{t.n - 1}")
    census = census or tree_subtree_polynomial(t)
    ell = leaf_count(t)
    lower = math.comb(ell, k)
    upper = math.comb(ell + k - 1, k) if k > 0 else 1
    value = census.s(t.n - k)
    return lower, value, upper, lower <= value <= upper


# Pruefer codes ----------------------------------------------------------------


def prufer_encode(t: LabelledTree) -> list[int]:
    """Repeatedly strip the smallest leaf and record its neighbour."""
    if t.n < 2:
        raise TreeError("Pruefer code needs at least two vertices")
    nbrs = [set() for _ in range(t.n)]
    for u, v in t.edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    leaves = [v for v in range(t.n) if len(nbrs[v]) == 1]
    heapq.heapify(leaves)
    seq = []
    for _ in range(t.n - 2):
        leaf = heapq.heappop(leaves)
        (nb,) = nbrs[leaf]
        seq.append(nb)
        nbrs[nb].discard(leaf)
        nbrs[leaf].clear()
        if len(nbrs[nb]) == 1:
            heapq.heappush(leaves, nb)
    return seq


def prufer_decode(seq: Sequence[int], n: int) -> LabelledTree:
    if n < 2:
        raise TreeError("Pruefer decode needs n >= 2")
    if len(seq) != n - 2:
        raise TreeError(f"sequence for n = {n} must have length {n - 2}, got {len(seq)}")
    if any(not 0 <= x < n for x in seq):
        raise TreeError(f"sequence entries must lie in 0..{n - 1}")
    deg = [1] * n
    for x in seq:
        deg[x] += 1
    leaves = [v for v in range(n) if deg[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        deg[x] -= 1
        if deg[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return LabelledTree.from_edges(n, edges)


# Leaf-count enumeration ---------------------------------------------------------


def surjection_count(a: int, b: int) -> int:
    """Onto maps from an ``a``-set to a ``b``-set, by inclusion-exclusion."""
    if a < 0 or b < 0:
        raise ValueError("sizes must be nonnegative")
    if b > a:
        return 0
    return sum((-1) ** i * math.comb(b, i) * (b - i) ** a for i in range(b + 1))


def trees_with_leaf_count(n: int, leaves: int) -> int:
    """Labelled trees on ``n`` vertices with exactly ``leaves`` leaves.

    Non-leaves are exactly the symbols used by the Pruefer code, so the count is
    ``C(n, l) * Sur(n - 2, n - l)``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 <= leaves <= n:
        raise ValueError(f"leaf count must lie in 0..{n}")
    return math.comb(n, leaves) * surjection_count(n - 2, n - leaves)


def leaf_deficient_tree_bound(n: int, beta) -> int:
    """Number of labelled trees on ``n`` vertices with fewer than ``beta * n`` leaves."""
    b = Fraction(str(beta)) if isinstance(beta, float) else Fraction(beta)
    if b <= 0:
        raise ValueError("beta must be positive")
    limit = b * n
    return sum(trees_with_leaf_count(n, ell) for ell in range(n + 1) if ell < limit)


# Rooted forests -------------------------------------------------------------------


@dataclass(frozen=True)
class RootedForest:
    """Nodes ``0..len(parent)-1``; ``parent[v] is None`` (or negative) marks a root."""

    parent: tuple

    def __post_init__(self):
        n = len(self.parent)
        for v, p in enumerate(self.parent):
            if p is not None and p >= 0 and not 0 <= p < n:
                raise TreeError(f"parent of {v} out of range")
        # every node must reach a root
        state = [0] * n
        for v in range(n):
            trail = []
            u = v
            while u is not None and u >= 0 and state[u] == 0:
                state[u] = 1
                trail.append(u)
                u = self.parent[u]
            if u is not None and u >= 0 and state[u] == 1:
                raise TreeError("parent pointers contain a cycle")
            for x in trail:
                state[x] = 2

    @property
    def size(self) -> int:
        return len(self.parent)

    def is_root(self, v: int) -> bool:
        p = self.parent[v]
        return p is None or p < 0

    def subtree_sizes(self) -> list[int]:
        n = self.size
        size = [1] * n
        depth = [0] * n
        for v in range(n):
            u, d = v, 0
            while not self.is_root(u):
                u = self.parent[u]
                d += 1
            depth[v] = d
        for v in sorted(range(n), key=lambda x: -depth[x]):
            if not self.is_root(v):
                size[self.parent[v]] += size[v]
        return size


def forest_linear_extensions(f: RootedForest) -> int:
    """Orderings with every node after its parent: ``|F|! / prod s(v)``."""
    num = math.factorial(f.size)
    den = math.prod(f.subtree_sizes())
    q, r = divmod(num, den)
    assert r == 0
    return q


def linear_extensions_oracle(f: RootedForest) -> int:
    """Count orderings by explicit enumeration (small forests only)."""
    n = f.size
    if n > 8:
        raise ValueError("oracle limited to 8 nodes")
    children = [[] for _ in range(n)]
    for v in range(n):
        if not f.is_root(v):
            children[f.parent[v]].append(v)

    def rec(avail, k):
        if k == n:
            return 1
        total = 0
        for i, v in enumerate(avail):
            total += rec(avail[:i] + avail[i + 1:] + children[v], k + 1)
        return total

    return rec([v for v in range(n) if f.is_root(v)], 0)

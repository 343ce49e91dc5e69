"""Simple labelled graphs stored as per-vertex neighbour bitsets.

Vertices are the integers ``0..n-1``.  A vertex set is a Python ``int`` used as a
bitset (bit ``v`` set means ``v`` is in the set); functions that take vertex sets
also accept any iterable of labels.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

log = logging.getLogger(__name__)

MAX_VERTICES = 512

VertexSet = Union[int, Iterable[int]]


class GraphError(ValueError):
    pass


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: VertexSet) -> int:
    if isinstance(vertices, int):
        if vertices < 0:
            raise GraphError("vertex mask must be nonnegative")
        return vertices
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph; ``adj[v]`` is the neighbour bitset of ``v``."""

    n: int
    adj: tuple[int, ...]
    edge_count: int

    def __post_init__(self):
        if not 0 <= self.n <= MAX_VERTICES:
            raise GraphError(f"graph order must lie in [0, {MAX_VERTICES}], got {self.n}")
        if len(self.adj) != self.n:
            raise GraphError("adjacency length does not match n")

    @property
    def all_vertices(self) -> int:
        return (1 << self.n) - 1

    def neighbors(self, v: int) -> list[int]:
        return list(bits(self.adj[v]))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adj]

    def edges(self) -> list[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        return [(u, v) for u in range(self.n) for v in bits(self.adj[u] >> (u + 1) << (u + 1))]

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return the graph with vertex ``v`` renamed ``perm[v]``."""
        return build_graph(self.n, [(perm[u], perm[v]) for u, v in self.edges()])

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.edge_count})"


@dataclass(frozen=True)
class Multigraph:
    """Loopless multigraph given by a symmetric matrix of edge multiplicities."""

    n: int
    multiplicity: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = self.multiplicity
        if len(m) != self.n or any(len(row) != self.n for row in m):
            raise GraphError("multiplicity matrix must be n x n")
        for i in range(self.n):
            if m[i][i] != 0:
                raise GraphError("multigraph diagonal must be zero")
            for j in range(i + 1, self.n):
                if m[i][j] != m[j][i] or m[i][j] < 0:
                    raise GraphError("multiplicities must be symmetric and nonnegative")

    @classmethod
    def from_graph(cls, g: Graph) -> "Multigraph":
        rows = tuple(tuple(int(g.has_edge(u, v)) for v in range(g.n)) for u in range(g.n))
        return cls(g.n, rows)

    def laplacian(self) -> list[list[int]]:
        lap = [[-x for x in row] for row in self.multiplicity]
        for i, row in enumerate(self.multiplicity):
            lap[i][i] = sum(row)
        return lap


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a graph on ``n`` vertices; repeated edges collapse to one."""
    if not 0 <= n <= MAX_VERTICES:
        raise GraphError(f"graph order must lie in [0, {MAX_VERTICES}], got {n}")
    adj = [0] * n
    for u, v in edges:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise GraphError(f"self-loop at vertex {u} is not allowed")
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    m = sum(a.bit_count() for a in adj) // 2
    return Graph(n, tuple(adj), m)


def _positive(name, *sizes):
    for s in sizes:
        if not isinstance(s, int) or s <= 0:
            raise GraphError(f"{name}: sizes must be positive integers, got {sizes}")


def complete(n: int) -> Graph:
    _positive("complete", n)
    return build_graph(n, combinations(range(n), 2))


def complete_bipartite(m: int, n: int) -> Graph:
    """Sides are ``0..m-1`` and ``m..m+n-1``."""
    _positive("complete_bipartite", m, n)
    return build_graph(m + n, [(i, m + j) for i in range(m) for j in range(n)])


def path(n: int) -> Graph:
    _positive("path", n)
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if not isinstance(n, int) or n < 3:
        raise GraphError(f"cycle: need at least 3 vertices, got {n}")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def star(n: int) -> Graph:
    """Centre 0 joined to leaves ``1..n-1``."""
    _positive("star", n)
    return build_graph(n, [(0, i) for i in range(1, n)])


def clique_pendant_path(clique_n: int, path_len: int) -> Graph:
    """``K_clique_n`` on ``0..clique_n-1`` with a path of ``path_len`` edges hanging off vertex 0.

    Path vertices are ``clique_n, clique_n+1, ...`` in order along the path.
    """
    _positive("clique_pendant_path", clique_n)
    if path_len < 0:
        raise GraphError("clique_pendant_path: path length must be nonnegative")
    c = clique_n
    edges = list(combinations(range(c), 2))
    prev = 0
    for i in range(path_len):
        edges.append((prev, c + i))
        prev = c + i
    return build_graph(c + path_len, edges)


def clique_path_clique(clique_n: int, path_len: int) -> Graph:
    """Two copies of ``K_clique_n`` joined by a path through ``path_len`` new vertices.

    Labels: first clique ``0..c-1``, second clique ``c..2c-1``, path vertices
    ``2c..2c+path_len-1`` in order.  The path runs from vertex 0 through the path
    vertices to vertex ``c``, so it has ``path_len + 1`` edges.
    """
    _positive("clique_path_clique", clique_n)
    if path_len < 0:
        raise GraphError("clique_path_clique: path length must be nonnegative")
    c = clique_n
    edges = list(combinations(range(c), 2)) + list(combinations(range(c, 2 * c), 2))
    chain = [0] + [2 * c + i for i in range(path_len)] + [c]
    edges += list(zip(chain, chain[1:]))
    return build_graph(2 * c + path_len, edges)


FAMILIES = {
    "complete": complete,
    "complete_bipartite": complete_bipartite,
    "path": path,
    "cycle": cycle,
    "star": star,
    "clique_pendant_path": clique_pendant_path,
    "clique_path_clique": clique_path_clique,
}


def named_graph(family: str, *params: int) -> Graph:
    try:
        ctor = FAMILIES[family]
    except KeyError:
        raise GraphError(f"unknown graph family {family!r}; choose from {sorted(FAMILIES)}") from None
    return ctor(*params)


def induced_subgraph(g: Graph, vertices: VertexSet) -> tuple[Graph, list[int]]:
    """Subgraph induced on ``vertices``, relabelled ``0..|S|-1`` in increasing order.

    Returns the graph and the list mapping new labels to old ones.
    """
    mask = to_mask(vertices)
    if mask >> g.n:
        raise GraphError("vertex set is not contained in the graph")
    old = list(bits(mask))
    new_of = {v: i for i, v in enumerate(old)}
    edges = [(new_of[u], new_of[v]) for u in old for v in bits(g.adj[u] & mask) if u < v]
    return build_graph(len(old), edges), old


def component_of(g: Graph, v: int, within: int | None = None) -> int:
    """Bitset of the component containing ``v`` inside the vertex set ``within``."""
    within = g.all_vertices if within is None else within
    seen = 1 << v
    frontier = seen
    while frontier:
        nxt = 0
        for u in bits(frontier):
            nxt |= g.adj[u]
        frontier = nxt & within & ~seen
        seen |= frontier
    return seen


def is_connected_set(g: Graph, mask: int) -> bool:
    if mask == 0:
        return False
    low = (mask & -mask).bit_length() - 1
    return component_of(g, low, mask) == mask


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or is_connected_set(g, g.all_vertices)


def components(g: Graph) -> list[int]:
    rest = g.all_vertices
    out = []
    while rest:
        low = (rest & -rest).bit_length() - 1
        comp = component_of(g, low)
        out.append(comp)
        rest &= ~comp
    return out


def contract_connected_set(g: Graph, vertices: VertexSet) -> Multigraph:
    """Contract the connected set ``S`` to vertex 0, keeping parallel edges.

    Remaining vertices keep their relative order and become ``1..n-|S|``.
    Edges inside ``S`` are dropped.
    """
    mask = to_mask(vertices)
    if mask == 0:
        raise GraphError("cannot contract an empty vertex set")
    if mask >> g.n:
        raise GraphError("vertex set is not contained in the graph")
    if not is_connected_set(g, mask):
        raise GraphError("contracted vertex set must induce a connected subgraph")
    rest = [v for v in range(g.n) if not mask >> v & 1]
    size = len(rest) + 1
    mult = [[0] * size for _ in range(size)]
    for i, v in enumerate(rest, start=1):
        cross = (g.adj[v] & mask).bit_count()
        mult[0][i] = mult[i][0] = cross
        for j, w in enumerate(rest, start=1):
            if g.has_edge(v, w):
                mult[i][j] = 1
    return Multigraph(size, tuple(tuple(r) for r in mult))


def degree_stats(g: Graph) -> tuple[int, int, bool]:
    """``(min degree, max degree, connected)``; the empty graph reports ``(0, 0, True)``."""
    if g.n == 0:
        return 0, 0, True
    deg = g.degrees()
    return min(deg), max(deg), is_connected(g)


def connected_sets(g: Graph) -> Iterator[int]:
    """Yield every nonempty connected vertex set exactly once, as a bitset.

    Each set is reached only from its lowest vertex ``v``; the search extends a
    set by one neighbour at a time and never revisits a vertex that an earlier
    sibling branch already decided on.
    """
    for v in range(g.n):
        below = (1 << v) - 1
        stack = [(1 << v, g.adj[v] & ~below, below)]
        while stack:
            s, ext, banned = stack.pop()
            yield s
            while ext:
                w = ext & -ext
                ext ^= w
                nbrs = g.adj[w.bit_length() - 1]
                stack.append((s | w, (ext | nbrs) & ~(s | w | banned), banned))
                banned |= w


# Edge-list text format ------------------------------------------------------


def parse_edge_list(text: str) -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``u v``; ``#`` starts a comment."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise GraphError("edge list is empty")
    header = lines[0].split()
    if len(header) != 2:
        raise GraphError("first line must be 'n m'")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise GraphError("first line must contain two integers") from None
    body = lines[1:]
    if len(body) != m:
        raise GraphError(f"header declares {m} edges but {len(body)} edge lines follow")
    edges = []
    for line in body:
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"bad edge line {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphError(f"bad edge line {line!r}") from None
    g = build_graph(n, edges)
    dupes = m - g.edge_count
    if dupes:
        log.info("collapsed %d duplicate edge(s)", dupes)
    return g


def read_edge_list(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def format_edge_list(g: Graph) -> str:
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g))

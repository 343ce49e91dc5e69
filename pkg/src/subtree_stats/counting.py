"""Exact subtree counting: spanning trees, subtree census, pair counts, P(G).

All counts are Python integers.  The heavy sums over vertex sets run in the
compiled kernel modulo several primes and are reassembled here by Chinese
remaindering against an explicit upper bound, so the results are exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence, Union

import numpy as np

from . import _kernel
from .graph import (
    Graph,
    Multigraph,
    bits,
    degree_stats,
    is_connected,
    is_connected_set,
)

DEFAULT_MAX_EXACT_N = 24
BRUTE_FORCE_MAX_N = 10
ORACLE_MAX_N = 9
TOP_EXACT_MAX_N = _kernel.KERNEL_MAX_N
TOP_EXACT_MAX_SETS = 10**6
DEFAULT_WORK_BUDGET = 10**6
EPS = 2.0**-53


class CapExceeded(ValueError):
    """An exact computation was asked for a graph above its size cap."""


class BudgetExceeded(ValueError):
    pass


class DisconnectedGraphError(ValueError):
    pass


# Value types ----------------------------------------------------------------


@dataclass(frozen=True)
class Census:
    """Subtree counts by order: ``counts[k - 1]`` is the number of ``k``-vertex subtrees."""

    n: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != self.n:
            raise ValueError("census must have one entry per order 1..n")
        if any(c < 0 for c in self.counts):
            raise ValueError("census entries must be nonnegative")

    def s(self, k: int) -> int:
        if not 1 <= k <= self.n:
            raise IndexError(f"subtree order {k} outside 1..{self.n}")
        return self.counts[k - 1]

    @property
    def spanning(self) -> int:
        return self.counts[-1] if self.n else 0

    @property
    def total(self) -> int:
        return sum(self.counts)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "counts": [str(c) for c in self.counts]})

    @classmethod
    def from_json(cls, text: str) -> "Census":
        data = json.loads(text)
        return cls(int(data["n"]), tuple(int(c) for c in data["counts"]))


@dataclass(frozen=True)
class ExactRatio:
    """A nonnegative rational kept in lowest terms."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        if self.numerator < 0:
            raise ValueError("value must be nonnegative")
        if math.gcd(self.numerator, self.denominator) != 1:
            raise ValueError("fraction must be in lowest terms")

    @classmethod
    def of(cls, value: Fraction):
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def float_value(self) -> float:
        return float(self.fraction)

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"


@dataclass(frozen=True)
class ExactProbability(ExactRatio):
    def __post_init__(self):
        super().__post_init__()
        if self.numerator > self.denominator:
            raise ValueError("probability must not exceed 1")


@dataclass(frozen=True)
class PairCount:
    k: int
    value: int


@dataclass(frozen=True)
class TopCensus:
    """Counts of the largest subtrees: ``values[k]`` describes ``s_{n-k}``.

    In exact mode ``values`` holds integers.  Otherwise it holds natural logs
    (``-inf`` for a zero count) and ``rel_error`` bounds the relative error of
    each ratio ``s_{n-k} / s_n`` under the float model used.
    """

    n: int
    depth: int
    exact: bool
    values: tuple
    rel_error: float = 0.0

    def ratio(self, k: int):
        """``s_{n-k} / s_n`` as a Fraction (exact mode) or float."""
        if self.exact:
            if self.values[0] == 0:
                raise DisconnectedGraphError("graph has no spanning tree")
            return Fraction(self.values[k], self.values[0])
        return math.exp(self.values[k] - self.values[0])

    def counts_low_to_high(self):
        """Values ordered ``s_{n-K}, ..., s_n``."""
        return tuple(reversed(self.values))


@dataclass(frozen=True)
class CertifiedInterval:
    lower: float
    upper: float
    depth: int
    certified: bool
    mode: str
    head: float = field(default=math.nan)
    tail: float = field(default=math.nan)

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper <= 1.0:
            raise ValueError(f"bad interval [{self.lower}, {self.upper}]")

    @property
    def midpoint(self) -> float:
        return (self.lower + self.upper) / 2

    @property
    def relative_width(self) -> float:
        return (self.upper - self.lower) / self.midpoint

    def contains(self, value) -> bool:
        return self.lower <= value <= self.upper


# Spanning trees -------------------------------------------------------------


def _bareiss_det(mat: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination; all intermediate values stay integral."""
    m = len(mat)
    if m == 0:
        return 1
    a = [row[:] for row in mat]
    sign = 1
    prev = 1
    for c in range(m - 1):
        if a[c][c] == 0:
            for r in range(c + 1, m):
                if a[r][c] != 0:
                    a[c], a[r] = a[r], a[c]
                    sign = -sign
                    break
            else:
                return 0
        piv = a[c][c]
        row_c = a[c]
        for r in range(c + 1, m):
            row_r = a[r]
            f = row_r[c]
            for j in range(c + 1, m):
                row_r[j] = (piv * row_r[j] - f * row_c[j]) // prev
            row_r[c] = 0
        prev = piv
    return sign * a[m - 1][m - 1]


def _laplacian(h: Union[Graph, Multigraph]) -> list[list[int]]:
    if isinstance(h, Multigraph):
        return h.laplacian()
    lap = [[0] * h.n for _ in range(h.n)]
    for u in range(h.n):
        lap[u][u] = h.degree(u)
        for v in bits(h.adj[u]):
            lap[u][v] = -1
    return lap


def spanning_tree_count(h: Union[Graph, Multigraph]) -> int:
    """Number of spanning trees (Kirchhoff), exact.  0 if disconnected, 1 if ``n == 1``."""
    if h.n == 0:
        return 0
    if h.n == 1:
        return 1
    lap = _laplacian(h)
    return _bareiss_det([row[1:] for row in lap[1:]])


def _reduced_laplacian_float(g: Graph) -> np.ndarray:
    a = _adjacency_array(g)
    lap = np.diag(a.sum(axis=1)) - a
    return lap[1:, 1:]


def log_spanning_tree_count(g: Graph) -> float:
    """Natural log of the spanning-tree count via pivoted LU in float64."""
    if not is_connected(g) or g.n == 0:
        raise DisconnectedGraphError("log of the spanning-tree count is undefined for a disconnected graph")
    if g.n <= 2:
        return 0.0
    sign, logdet = np.linalg.slogdet(_reduced_laplacian_float(g))
    if sign <= 0:
        raise ArithmeticError("reduced Laplacian lost positivity; matrix too ill-conditioned")
    return float(logdet)


# Helpers shared with the kernel --------------------------------------------


def _adjacency_array(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u, v in g.edges():
        a[u, v] = a[v, u] = 1.0
    return a


def _kernel_adj(g: Graph) -> np.ndarray:
    return np.array(g.adj, dtype=np.int64)


def _primes_needed(bound: int) -> int:
    prod, t = 1, 0
    while prod <= bound:
        if t == len(_kernel.PRIMES):
            raise OverflowError("bound exceeds the modular prime pool")
        prod *= int(_kernel.PRIMES[t])
        t += 1
    return max(t, 1)


def _crt(residues: Sequence[int], t: int) -> int:
    x, mod = 0, 1
    for r, p in zip(residues[:t], _kernel.PRIMES[:t]):
        p = int(p)
        r = int(r)
        # solve x + mod * y == r (mod p)
        y = (r - x) * pow(mod, -1, p) % p
        x += mod * y
        mod *= p
    return x


def _check_cap(g: Graph, cap: int, what: str, flag: str = "--max-exact-n"):
    if g.n > cap:
        raise CapExceeded(f"{what} is limited to n <= {cap} (graph has n = {g.n}); raise {flag} to allow more")
    if g.n > _kernel.KERNEL_MAX_N:
        raise CapExceeded(f"{what} supports at most {_kernel.KERNEL_MAX_N} vertices")


def _cayley_like(k: int) -> int:
    return 1 if k <= 2 else k ** (k - 2)


@lru_cache(maxsize=512)
def _census_counts(g: Graph) -> tuple[int, ...]:
    n = g.n
    bounds = [0] + [math.comb(n, k) * _cayley_like(k) for k in range(1, n + 1)]
    nprimes = np.array([_primes_needed(b) for b in bounds], dtype=np.int64)
    acc = _kernel.connected_set_residues(_kernel_adj(g), n, _kernel.PRIMES, nprimes, 0)
    return tuple(_crt(acc[k], int(nprimes[k])) for k in range(1, n + 1))


@lru_cache(maxsize=512)
def _pair_counts(g: Graph) -> tuple[int, ...]:
    """``out[k]`` = number of pairs (S, T) with ``|S| = n - k``."""
    n = g.n
    spanning_bound = n ** max(n - 2, 0)
    out = [0] * n
    bounds = [0] * (n + 1)
    for size in range(1, n + 1):
        bounds[size] = math.comb(n, size) * spanning_bound
    nprimes = np.array([_primes_needed(b) for b in bounds], dtype=np.int64)
    acc = _kernel.connected_set_residues(_kernel_adj(g), n, _kernel.PRIMES, nprimes, 1)
    for size in range(1, n + 1):
        out[n - size] = _crt(acc[size], int(nprimes[size]))
    return tuple(out)


# Census ---------------------------------------------------------------------


def subtree_census(g: Graph, max_exact_n: int = DEFAULT_MAX_EXACT_N) -> Census:
    """Exact ``s_1..s_n``: sum of spanning-tree counts of ``G[S]`` over connected ``S``."""
    _check_cap(g, max_exact_n, "subtree_census")
    if g.n == 0:
        return Census(0, ())
    return Census(g.n, _census_counts(g))


def brute_force_census(g: Graph) -> Census:
    """Census by explicit enumeration of every subtree as an edge set.

    Trees are grown one pendant edge at a time from single edges; the set of
    edge sets of each size removes duplicates.  Independent of any determinant.
    """
    if g.n > BRUTE_FORCE_MAX_N:
        raise CapExceeded(f"brute_force_census is limited to n <= {BRUTE_FORCE_MAX_N}")
    counts = [0] * g.n
    if g.n == 0:
        return Census(0, ())
    counts[0] = g.n
    layer = {}
    for u, v in g.edges():
        layer[frozenset([(u, v)])] = (1 << u) | (1 << v)
    size = 2
    while layer and size <= g.n:
        counts[size - 1] = len(layer)
        nxt = {}
        for edges, vmask in layer.items():
            for u in bits(vmask):
                for w in bits(g.adj[u] & ~vmask):
                    e = (u, w) if u < w else (w, u)
                    grown = edges | {e}
                    if grown not in nxt:
                        nxt[grown] = vmask | (1 << w)
        layer = nxt
        size += 1
    return Census(g.n, tuple(counts))


def closed_form_census(family: str, *sizes: int) -> Census:
    """Census of ``complete(n)`` or ``complete_bipartite(m, n)`` from counting formulas."""
    if family == "complete":
        (n,) = sizes
        if n < 1:
            raise ValueError("complete graph needs n >= 1")
        return Census(n, tuple(n if k == 1 else math.comb(n, k) * k ** (k - 2) for k in range(1, n + 1)))
    if family == "complete_bipartite":
        m, n = sizes
        if m < 1 or n < 1:
            raise ValueError("complete bipartite graph needs both sides >= 1")
        counts = [0] * (m + n)
        counts[0] = m + n
        for i in range(1, m + 1):
            ci = math.comb(m, i)
            for j in range(1, n + 1):
                # spanning trees of K_{i,j}
                counts[i + j - 1] += ci * math.comb(n, j) * j ** (i - 1) * i ** (j - 1)
        return Census(m + n, tuple(counts))
    raise ValueError(f"no closed form for family {family!r}")


def _as_census(source, max_exact_n=DEFAULT_MAX_EXACT_N) -> Census:
    if isinstance(source, Census):
        return source
    return subtree_census(source, max_exact_n)


def spanning_probability(source: Union[Graph, Census], max_exact_n: int = DEFAULT_MAX_EXACT_N) -> ExactProbability:
    """``P(G) = s_n / T(G)``, the chance that a uniform random subtree is spanning."""
    c = _as_census(source, max_exact_n)
    if c.n == 0:
        raise ValueError("P(G) is undefined for the empty graph")
    return ExactProbability.of(Fraction(c.spanning, c.total))


def mean_subtree_edges(source: Union[Graph, Census], max_exact_n: int = DEFAULT_MAX_EXACT_N) -> ExactRatio:
    c = _as_census(source, max_exact_n)
    if c.n == 0:
        raise ValueError("mean subtree size is undefined for the empty graph")
    weighted = sum((k - 1) * s for k, s in enumerate(c.counts, start=1))
    return ExactRatio.of(Fraction(weighted, c.total))


# Largest subtrees -----------------------------------------------------------


def _deletion_work(n, depth):
    return sum(math.comb(n, k) for k in range(depth + 1))


def top_census(
    g: Graph,
    depth: int,
    mode: str = "auto",
    budget: int = DEFAULT_WORK_BUDGET,
) -> TopCensus:
    """Counts ``s_{n-k}`` for ``k = 0..depth`` as sums of ``tau(G - U)`` over ``|U| = k``.

    ``mode`` is ``"exact"``, ``"log"`` or ``"auto"`` (exact when ``n`` fits the
    kernel and ``C(n, depth)`` is at most a million).  ``budget`` caps the total
    number of deleted sets examined.
    """
    n = g.n
    if not 0 <= depth < n:
        raise ValueError(f"depth must lie in 0..{n - 1}")
    work = _deletion_work(n, depth)
    if work > budget:
        raise BudgetExceeded(
            f"top_census(depth={depth}) needs {work} determinant evaluations, over the budget of {budget}"
        )
    if mode == "auto":
        mode = "exact" if n <= TOP_EXACT_MAX_N and math.comb(n, depth) <= TOP_EXACT_MAX_SETS else "log"
    if mode == "exact":
        if n > TOP_EXACT_MAX_N:
            raise CapExceeded(f"exact top_census supports at most {TOP_EXACT_MAX_N} vertices")
        adj = _kernel_adj(g)
        vals = []
        for k in range(depth + 1):
            m = n - k
            t = _primes_needed(math.comb(n, k) * _cayley_like(m))
            acc = _kernel.deletion_residues(adj, n, k, _kernel.PRIMES, t)
            vals.append(_crt(acc, t))
        return TopCensus(n, depth, True, tuple(vals))
    if mode != "log":
        raise ValueError(f"unknown mode {mode!r}")
    return _top_census_log(g, depth)


def _top_census_log(g: Graph, depth: int) -> TopCensus:
    n = g.n
    if not is_connected(g):
        raise DisconnectedGraphError("log-domain top census needs a connected graph")
    a = _adjacency_array(g)
    log_sn = log_spanning_tree_count(g)
    mindeg = min(g.degrees())
    vals = [log_sn]
    for k in range(1, depth + 1):
        m = n - k
        terms = []
        chunk = max(1, 4_000_000 // max(m * m, 1))
        batch = []
        dirac = 2 * (mindeg - k) >= m - 1
        for u in combinations(range(n), k):
            umask = 0
            for x in u:
                umask |= 1 << x
            w = g.all_vertices & ~umask
            if not dirac and not is_connected_set(g, w):
                continue
            batch.append([x for x in range(n) if not umask >> x & 1])
            if len(batch) == chunk:
                terms.extend(_batched_log_tau(a, batch))
                batch = []
        if batch:
            terms.extend(_batched_log_tau(a, batch))
        if not terms:
            vals.append(-math.inf)
            continue
        ratio = math.fsum(math.exp(t - log_sn) for t in terms)
        vals.append(log_sn + math.log(ratio))
    # LU backward error per determinant is O(m eps); ten times that per ratio
    rel = 10.0 * 4 * n * EPS
    return TopCensus(n, depth, False, tuple(vals), rel_error=rel)


def _batched_log_tau(a: np.ndarray, batch: list[list[int]]) -> list[float]:
    w = np.array(batch)
    sub = a[w[:, :, None], w[:, None, :]]
    lap = -sub
    idx = np.arange(w.shape[1])
    lap[:, idx, idx] = sub.sum(axis=2)
    if w.shape[1] == 1:
        return [0.0] * len(batch)
    sign, logdet = np.linalg.slogdet(lap[:, 1:, 1:])
    if np.any(sign <= 0):
        raise ArithmeticError("nonpositive determinant for a connected vertex-deleted graph")
    return logdet.tolist()


# Pair counts ----------------------------------------------------------------


def pair_count(g: Graph, k: int, max_exact_n: int = DEFAULT_MAX_EXACT_N) -> PairCount:
    """Pairs ``(S, T)``: spanning tree ``T`` and subtree ``S`` of ``T`` on ``n - k`` vertices.

    Spanning trees containing a fixed subtree on vertex set ``S`` correspond to
    spanning trees of ``G / S``, so each connected ``S`` contributes
    ``tau(G[S]) * tau(G / S)``.
    """
    _check_cap(g, max_exact_n, "pair_count")
    if not 0 <= k < g.n:
        raise ValueError(f"k must lie in 0..{g.n - 1}")
    return PairCount(k, _pair_counts(g)[k])


def spanning_trees(g: Graph) -> list[tuple[tuple[int, int], ...]]:
    """All spanning trees as edge tuples, by backtracking over edges."""
    if g.n > ORACLE_MAX_N:
        raise CapExceeded(f"explicit spanning-tree enumeration is limited to n <= {ORACLE_MAX_N}")
    edges = g.edges()
    need = g.n - 1
    out = []
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    chosen = []

    def rec(i):
        if len(chosen) == need:
            out.append(tuple(chosen))
            return
        if len(edges) - i < need - len(chosen):
            return
        u, v = edges[i]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            chosen.append((u, v))
            rec(i + 1)
            chosen.pop()
            parent[ru] = ru
        rec(i + 1)

    if g.n >= 1:
        rec(0)
    return out


def pair_count_oracle(g: Graph, k: int) -> PairCount:
    """Same quantity counted from the other side: sum of ``s_{n-k}(T)`` over spanning trees."""
    from .trees import LabelledTree, tree_subtree_polynomial

    if g.n > ORACLE_MAX_N:
        raise CapExceeded(f"pair_count_oracle is limited to n <= {ORACLE_MAX_N}")
    if not 0 <= k < g.n:
        raise ValueError(f"k must lie in 0..{g.n - 1}")
    total = 0
    for edges in spanning_trees(g):
        t = LabelledTree.from_edges(g.n, edges)
        total += tree_subtree_polynomial(t).s(g.n - k)
    return PairCount(k, total)


def sandwich_report(g: Graph, k: int, max_exact_n: int = DEFAULT_MAX_EXACT_N):
    """``((delta-k)^k s_{n-k}, P_k, C(n,k) s_n, holds)`` for the double-counting bounds."""
    delta = degree_stats(g)[0]
    if k > delta:
        raise ValueError(f"k = {k} exceeds the minimum degree {delta}")
    c = subtree_census(g, max_exact_n)
    n = g.n
    value = pair_count(g, k, max_exact_n).value
    lower = (delta - k) ** k * c.s(n - k)
    upper = math.comb(n, k) * c.spanning
    return lower, value, upper, lower <= value <= upper


def prefix_bound_holds(c: Census) -> bool:
    """``s_1 + ... + s_r <= 2^r s_r`` for every ``r`` with ``s_r > 0``."""
    run = 0
    for r, s in enumerate(c.counts, start=1):
        run += s
        if s > 0 and run > 2**r * s:
            return False
    return True


# Certified P(G) -------------------------------------------------------------


def _float_down(x: Fraction) -> float:
    f = float(x)
    return math.nextafter(f, -math.inf) if Fraction(f) > x else f


def _float_up(x: Fraction) -> float:
    f = float(x)
    return math.nextafter(f, math.inf) if Fraction(f) < x else f


def _complete_prefix(n: int) -> list[int]:
    """``pre[r]`` = number of subtrees of ``K_n`` with at most ``r`` vertices."""
    pre = [0] * (n + 1)
    for j in range(1, n + 1):
        pre[j] = pre[j - 1] + (n if j == 1 else math.comb(n, j) * j ** (j - 2))
    return pre


def _tail_exact(n: int, delta: int, start: int, spanning: int | None, log_spanning: float | None):
    """Rigorous bound on ``sum_{k >= start} s_{n-k}/s_n``, as an exact Fraction.

    Takes the smaller of the textbook three-regime bound and a sharper variant
    that splits at the best ``M`` and covers ``k > M`` either by the doubling
    argument or by comparison with the subtrees of ``K_n``.
    """
    from .asymptotics import eq1_bound, tail_bound

    best = tail_bound(n, delta, start, exact=True)
    pre = _complete_prefix(n)
    running = Fraction(0)
    # split at m: eq1 terms for start <= k < m, one bound for everything k >= m
    for m in range(start, delta + 1):
        beyond = None
        if m < delta:
            bound_m = eq1_bound(n, delta, m, exact=True)
            beyond = 2 ** (n - m) * bound_m
        if spanning is not None:
            cayley = Fraction(pre[n - m], spanning)
            beyond = cayley if beyond is None else min(beyond, cayley)
        elif log_spanning is not None:
            # padded float estimate, only used in numerical mode
            est = math.exp(math.log(pre[n - m]) - log_spanning) * (1 + 1e-6)
            if math.isfinite(est):
                beyond = Fraction(est) if beyond is None else min(beyond, Fraction(est))
        if beyond is not None:
            best = min(best, running + beyond)
        if m == delta:
            break
        running += bound_m
        if running >= best:
            break
    return best


def certified_probability_interval(
    g: Graph,
    depth: int,
    census: Census | None = None,
    mode: str = "auto",
    budget: int = DEFAULT_WORK_BUDGET,
) -> CertifiedInterval:
    """Enclosure of ``P(G)`` from the exact ratios ``s_{n-k}/s_n`` for ``k < depth``.

    The remaining ratios are bounded through the minimum degree.  With exact
    ratios (from ``census`` or an exact top census) the result is a true
    certificate; with log-domain ratios it is widened by a float-error margin
    and marked numerical.
    """
    n = g.n
    delta, _, connected = degree_stats(g)
    if not connected:
        raise DisconnectedGraphError("P(G) = 0 for a disconnected graph; no interval needed")
    if depth < 1 or 2 * depth >= delta:
        raise ValueError(f"depth K must satisfy 1 <= K < delta/2 (delta = {delta}, K = {depth})")
    if census is not None:
        ratios = [Fraction(census.s(n - k), census.spanning) for k in range(depth)]
        exact, spanning, log_sn, rel = True, census.spanning, None, 0.0
    else:
        top = top_census(g, depth - 1, mode=mode, budget=budget)
        ratios = [top.ratio(k) for k in range(depth)]
        exact = top.exact
        spanning = top.values[0] if exact else None
        log_sn = None if exact else top.values[0]
        rel = top.rel_error
    tail = _tail_exact(n, delta, depth, spanning, log_sn)
    if exact:
        head = sum(ratios, Fraction(0))
        lower = _float_down(1 / (head + tail))
        upper = min(1.0, _float_up(1 / head))
        return CertifiedInterval(lower, upper, depth, True, "exact", float(head), _float_up(tail))
    head = math.fsum(ratios)
    slack = rel + 4 * EPS * depth
    lower = 1.0 / ((head + float(tail)) * (1 + slack))
    upper = min(1.0, 1.0 / (head * (1 - slack)))
    return CertifiedInterval(lower, upper, depth, False, "numerical", head, _float_up(tail))

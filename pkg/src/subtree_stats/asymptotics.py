"""Limits, bounds and standardised statistics that the experiments compare against.

Bounds that feed certified intervals are evaluated exactly as rationals and
then rounded up to a float, so they never understate the true value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


def round_up(x: Fraction) -> float:
    f = float(x)
    return math.nextafter(f, math.inf) if Fraction(f) < x else f


@dataclass(frozen=True)
class DenseLimit:
    p_infinity: float

    @property
    def value(self) -> float:
        return dense_limit(self.p_infinity)


@dataclass(frozen=True)
class JansonStatistic:
    n: int
    p: float
    log_sn: float

    @property
    def value(self) -> float:
        return janson_statistic(self.log_sn, self.n, self.p)


def dense_limit(p: float) -> float:
    """Limit of P(G(n, p)) for edge probability tending to ``p``: ``exp(-1/(e p))``."""
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    return math.exp(-1.0 / (math.e * p))


def complete_bipartite_limit() -> float:
    """Limit of P(K_{n,n}), ``exp(-2/e)``."""
    return math.exp(-2.0 / math.e)


def poisson_ratio_target(k: int, p: float) -> float:
    """Limit of ``s_{n-k}/s_n`` in dense G(n, p): ``1 / (k! (e p)^k)``."""
    if p <= 0:
        raise ValueError("p must be positive")
    return 1.0 / (math.factorial(k) * (math.e * p) ** k)


def eq1_bound(n: int, delta: int, k: int, exact: bool = False):
    """Upper bound ``n^k / ((delta - k)^k k!)`` on ``s_{n-k}/s_n`` (needs ``k < delta``)."""
    if not 0 <= k < delta:
        raise ValueError(f"need 0 <= k < delta, got k = {k}, delta = {delta}")
    value = Fraction(n**k, (delta - k) ** k * math.factorial(k))
    return value if exact else round_up(value)


def tail_bound(n: int, delta: int, start: int, exact: bool = False):
    """Bound on ``sum_{k >= start} s_{n-k}/s_n`` for a connected graph of minimum degree ``delta``.

    Terms up to ``m = delta // 2`` use :func:`eq1_bound`; everything beyond is
    covered by ``2^n n^m / ((delta - m)^m m!)``.
    """
    m = delta // 2
    if not 0 <= start <= m:
        raise ValueError(f"start index must lie in 0..{m}")
    total = sum((eq1_bound(n, delta, k, exact=True) for k in range(start, m + 1)), Fraction(0))
    total += Fraction(2**n * n**m, (delta - m) ** m * math.factorial(m))
    return total if exact else round_up(total)


def janson_statistic(log_sn: float, n: int, p: float) -> float:
    """``sqrt(p) * (log s_n - log(n^(n-2) p^(n-1)) + (1-p)/p)``; limit law N(0, 2(1-p))."""
    if not 0 < p < 1:
        raise ValueError("p must lie strictly between 0 and 1")
    if n < 2:
        raise ValueError("n must be at least 2")
    centre = (n - 2) * math.log(n) + (n - 1) * math.log(p)
    return math.sqrt(p) * (log_sn - centre + (1 - p) / p)


def log_expected_spanning_trees(n: int, p: float) -> float:
    """``log(n^(n-2) p^(n-1))``."""
    return (n - 2) * math.log(n) + (n - 1) * math.log(p)


def total_subtrees_limit_law(p: float) -> tuple[float, float]:
    """Mean and variance of the normal limit of ``log T - log(n^(n-2) p^(n-1))``."""
    if not 0 < p < 1:
        raise ValueError("p must lie strictly between 0 and 1")
    ep = math.e * p
    return (1 - math.e + ep) / ep, (2 - 2 * p) / p


def chernoff_bounds(mu: float, t: float) -> tuple[float, float]:
    """Binomial tail bounds ``(P(X <= mu - t), P(X >= mu + t))``."""
    if mu <= 0 or t < 0:
        raise ValueError("need mu > 0 and t >= 0")
    return math.exp(-t * t / (2 * mu)), math.exp(-t * t / (2 * (mu + t / 3)))


def sparse_envelope(p: float, c: float) -> float:
    """``exp(-c/p)`` for an empirically fitted constant ``c``."""
    if p <= 0 or c <= 0:
        raise ValueError("p and c must be positive")
    return math.exp(-c / p)


def mean_order_target(p: float) -> float:
    """Limit of ``n - mean edges of a random subtree``: ``1 + 1/(e p)``."""
    if p <= 0:
        raise ValueError("p must be positive")
    return 1 + 1 / (math.e * p)

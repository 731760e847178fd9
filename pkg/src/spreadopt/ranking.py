"""Rank of target sets relative to a vertex cover, and near-optimal classes.

The rank rescales the spread objective so the reference cover scores 1
and the worst single node scores 0::

    rank(A) = (F_max - F(A)) / (F_max - F_min)

``F_max`` is the largest F over single nodes and ``F_min`` is F of a
vertex cover of size ``C`` (always ``N - C``).  The near-optimal class
with threshold ``nu`` is every non-empty set of size at most ``C`` whose
rank is at least ``nu``.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field
from itertools import combinations

from .cover import exact_min_cover, maximal_matching_cover
from .errors import (
    BudgetExceededError,
    DegenerateRankError,
    InvariantError,
    NoCoverError,
    TooLargeError,
)
from .graph import Graph
from .hitting import Objective

__all__ = [
    "RankContext",
    "NearOptimalClass",
    "rank_context",
    "rank",
    "marginal_gain",
    "enumerate_class",
    "subset_count",
    "ENUMERATION_BUDGET",
    "RANK_TOL",
]

ENUMERATION_BUDGET = 10_000_000
# rank comparisons against a threshold use this slack so that sets tied by
# symmetry never land on different sides of it through rounding
RANK_TOL = 1e-9


@dataclass(frozen=True)
class RankContext:
    C: int
    fmax: float
    fmin: float
    cover: frozenset[str]
    worst: str
    cover_source: str
    graph: Graph = field(repr=False, compare=False)
    objective: Objective = field(repr=False, compare=False)

    @property
    def cover_mask(self) -> int:
        return self.graph.mask(self.cover)

    def rank_mask(self, mask: int) -> float:
        if mask == 0:
            return 0.0
        return (self.fmax - self.objective(mask)) / (self.fmax - self.fmin)

    def rank(self, nodes: Iterable) -> float:
        return self.rank_mask(self.graph.mask(nodes))


def rank_context(g: Graph, C: int | None = None, objective: Objective | None = None) -> RankContext:
    """Reference cover, ``F_min`` and ``F_max`` for cardinality cap ``C``.

    Without ``C`` the greedy matching cover is used as is.  A larger ``C``
    pads that cover with the lowest-labelled outside nodes; a smaller one
    falls back to the exact minimum cover (small graphs only).
    """
    obj = objective if objective is not None else Objective(g)
    matching = g.mask(maximal_matching_cover(g).cover)
    size = matching.bit_count()
    if C is None:
        C = size
    if not 1 <= C <= g.n:
        raise ValueError(f"C must lie in [1, {g.n}], got {C}")

    base, source = matching, "matching"
    if C < size:
        try:
            exact = g.mask(exact_min_cover(g))
        except TooLargeError as exc:
            raise NoCoverError(
                f"C = {C} is below the matching cover size {size} and the graph is too "
                "large to search for a smaller cover"
            ) from exc
        if exact.bit_count() > C:
            raise NoCoverError(f"no vertex cover of size {C}; minimum is {exact.bit_count()}")
        base, source = exact, "exact"
    cover = base
    for i in range(g.n):
        if cover.bit_count() >= C:
            break
        if not cover >> i & 1:
            cover |= 1 << i
    if cover != base:
        source += "+padding"

    fmin = obj(cover)
    if abs(fmin - (g.n - C)) > 1e-9:
        raise InvariantError(f"reference cover has F = {fmin!r}, expected N - C = {g.n - C}")
    singles = [obj(1 << i) for i in range(g.n)]
    fmax = max(singles)
    worst = g.labels[singles.index(fmax)]
    if fmax - fmin <= 1e-12 * (1.0 + abs(fmax)):
        raise DegenerateRankError(f"F_max == F_min == {fmax!r}; every set of size <= {C} ties")
    return RankContext(C, fmax, fmin, g.nodeset(cover), worst, source, g, obj)


def rank(ctx: RankContext, nodes: Iterable) -> float:
    """Rank of ``nodes``; the empty set ranks 0 by convention.

    Sets larger than ``C`` use the same formula and may exceed 1.
    """
    return ctx.rank(nodes)


def marginal_gain(ctx: RankContext, nodes: Iterable, j) -> float:
    """Increase in rank from adding node ``j`` to ``nodes``."""
    g = ctx.graph
    mask = g.mask(nodes)
    bit = 1 << g.index(j)
    if mask & bit:
        raise ValueError(f"node {j!r} is already in the set")
    return ctx.rank_mask(mask | bit) - ctx.rank_mask(mask)


def subset_count(n: int, c: int) -> int:
    return sum(math.comb(n, k) for k in range(c + 1))


@dataclass(frozen=True)
class NearOptimalClass:
    """All non-empty sets of size <= ``C`` with rank >= ``nu``.

    ``masks`` are ordered by size, then lexicographically.  ``level_max[n]``
    is the best rank over sets of size at most ``n`` (index 0 unused).
    """

    nu: float
    C: int
    m: int
    masks: tuple[int, ...]
    ranks: dict[int, float] = field(repr=False, compare=False)
    level_max: tuple[float, ...] = field(repr=False)
    ctx: RankContext = field(repr=False, compare=False)

    @property
    def graph(self) -> Graph:
        return self.ctx.graph

    @property
    def members(self) -> tuple[frozenset[str], ...]:
        return tuple(self.graph.nodeset(x) for x in self.masks)

    def __len__(self) -> int:
        return len(self.masks)

    def __contains__(self, nodes) -> bool:
        return self.graph.mask(nodes) in self.ranks

    def of_size(self, n: int) -> tuple[int, ...]:
        return tuple(x for x in self.masks if x.bit_count() == n)


def enumerate_class(
    g: Graph,
    nu: float,
    C: int | None = None,
    ctx: RankContext | None = None,
    budget: int = ENUMERATION_BUDGET,
) -> NearOptimalClass:
    """Exact enumeration of the near-optimal class.

    Raises ``BudgetExceededError`` when more than ``budget`` subsets would
    have to be scored.
    """
    if not 0 < nu <= 1:
        raise ValueError(f"nu must lie in (0, 1], got {nu}")
    if ctx is None:
        ctx = rank_context(g, C)
    elif C is not None and C != ctx.C:
        raise ValueError(f"C = {C} disagrees with the rank context (C = {ctx.C})")
    C = ctx.C
    count = subset_count(g.n, C)
    if count > budget:
        raise BudgetExceededError(
            f"enumerating all subsets of size <= {C} of {g.n} nodes needs {count} evaluations "
            f"(budget {budget}); use a smaller C or graph",
            count,
        )

    ranks: dict[int, float] = {}
    level_max = [0.0]
    best = -math.inf
    for k in range(1, C + 1):
        for combo in combinations(range(g.n), k):
            mask = sum(1 << i for i in combo)
            r = ctx.rank_mask(mask)
            best = max(best, r)
            if r >= nu - RANK_TOL:
                ranks[mask] = r
        level_max.append(best)
    if not ranks:
        raise InvariantError(f"near-optimal class is empty for nu = {nu}, C = {C}")
    masks = tuple(sorted(ranks, key=Graph.set_key))
    return NearOptimalClass(nu, C, masks[0].bit_count(), masks, ranks, tuple(level_max), ctx)

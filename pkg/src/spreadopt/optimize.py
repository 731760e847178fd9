"""Solvers for minimising F over sets of at most K nodes.

Three routes: exhaustive search (the oracle), plain greedy from the empty
set, and greedy extension of a family of seed sets, keeping the best
extended set.  Ties are broken towards the smallest label everywhere.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from itertools import combinations

from .errors import BudgetExceededError, EmptySeedFamilyError
from .graph import Graph
from .hitting import Objective
from .ranking import ENUMERATION_BUDGET, NearOptimalClass, RankContext

__all__ = [
    "ExtensionTrace",
    "SearchResult",
    "brute_force_optimum",
    "greedy",
    "greedy_extend",
    "seeded_search",
    "cover_seeds",
    "TIE_TOL",
]

TIE_TOL = 1e-9


def _better(f: float, best: float) -> bool:
    if math.isinf(best):
        return f < best
    return f < best - TIE_TOL * (1.0 + abs(best))


@dataclass(frozen=True)
class ExtensionTrace:
    seed: frozenset[str]
    steps: tuple[tuple[str, float], ...]
    final: frozenset[str]
    final_f: float
    final_rank: float | None = None


@dataclass(frozen=True)
class SearchResult:
    best: frozenset[str]
    best_f: float
    traces: tuple[ExtensionTrace, ...]
    certified: bool
    optimum: frozenset[str] | None = None
    optimum_f: float | None = None
    best_rank: float | None = None


def brute_force_optimum(
    g: Graph, K: int, objective: Objective | None = None, budget: int = ENUMERATION_BUDGET
) -> tuple[frozenset[str], float]:
    """Exact minimiser of F over non-empty sets of size <= K.

    F strictly drops when a node is added, so only size-K sets are scored.
    """
    if not 1 <= K <= g.n:
        raise ValueError(f"K must lie in [1, {g.n}], got {K}")
    count = math.comb(g.n, K)
    if count > budget:
        raise BudgetExceededError(
            f"brute force over C({g.n}, {K}) = {count} sets exceeds the budget {budget}", count
        )
    obj = objective if objective is not None else Objective(g)
    best_mask, best_f = 0, math.inf
    for combo in combinations(range(g.n), K):
        mask = sum(1 << i for i in combo)
        f = obj(mask)
        if _better(f, best_f):
            best_mask, best_f = mask, f
    return g.nodeset(best_mask), best_f


def _extend(
    g: Graph, mask: int, K: int, obj: Objective, ctx: RankContext | None
) -> ExtensionTrace:
    seed = mask
    steps = []
    f = obj(mask) if mask else math.inf
    while mask.bit_count() < K:
        pick, pick_f = -1, math.inf
        for j in range(g.n):
            if mask >> j & 1:
                continue
            cand = obj(mask | 1 << j)
            if _better(cand, pick_f):
                pick, pick_f = j, cand
        mask |= 1 << pick
        f = pick_f
        steps.append((g.labels[pick], f))
    final_rank = ctx.rank_mask(mask) if ctx is not None else None
    return ExtensionTrace(g.nodeset(seed), tuple(steps), g.nodeset(mask), f, final_rank)


def greedy(
    g: Graph, K: int, objective: Objective | None = None, ctx: RankContext | None = None
) -> ExtensionTrace:
    """Standard greedy: repeatedly add the node giving the smallest F."""
    if not 1 <= K <= g.n:
        raise ValueError(f"K must lie in [1, {g.n}], got {K}")
    obj = objective if objective is not None else Objective(g)
    return _extend(g, 0, K, obj, ctx)


def greedy_extend(
    g: Graph,
    seed: Iterable,
    K: int,
    objective: Objective | None = None,
    ctx: RankContext | None = None,
) -> ExtensionTrace:
    mask = g.mask(seed)
    if not mask.bit_count() <= K <= g.n:
        raise ValueError(f"need |seed| <= K <= N, got |seed| = {mask.bit_count()}, K = {K}")
    obj = objective if objective is not None else Objective(g)
    return _extend(g, mask, K, obj, ctx)


def seeded_search(
    g: Graph,
    seeds: Iterable[Iterable],
    K: int,
    objective: Objective | None = None,
    ctx: RankContext | None = None,
    certify: bool = True,
    budget: int = ENUMERATION_BUDGET,
) -> SearchResult:
    """Greedily extend every seed to size ``K`` and keep the lowest F.

    With ``certify`` the winner is compared against brute force whenever
    ``C(N, K)`` fits in ``budget``; otherwise ``certified`` is False.
    """
    masks = sorted({g.mask(s) for s in seeds}, key=Graph.set_key)
    if not masks:
        raise EmptySeedFamilyError("seed family is empty")
    sizes = {x.bit_count() for x in masks}
    if len(sizes) != 1:
        raise ValueError(f"seeds must share one cardinality, got sizes {sorted(sizes)}")
    if sizes.pop() > K:
        raise ValueError("seeds are larger than K")
    obj = objective if objective is not None else (ctx.objective if ctx else Objective(g))

    traces = tuple(_extend(g, x, K, obj, ctx) for x in masks)
    best = traces[0]
    for tr in traces[1:]:
        if _better(tr.final_f, best.final_f) or (
            not _better(best.final_f, tr.final_f)
            and Graph.set_key(g.mask(tr.final)) < Graph.set_key(g.mask(best.final))
        ):
            best = tr

    certified, optimum, optimum_f = False, None, None
    if certify and math.comb(g.n, K) <= budget:
        optimum, optimum_f = brute_force_optimum(g, K, obj, budget)
        certified = not _better(optimum_f, best.final_f)
    return SearchResult(
        best.final, best.final_f, traces, certified, optimum, optimum_f, best.final_rank
    )


def cover_seeds(cls: NearOptimalClass) -> list[frozenset[str]]:
    """Size-``m`` subsets of the reference cover that belong to the class."""
    cover = cls.ctx.cover_mask
    g = cls.graph
    out = [g.nodeset(x) for x in cls.of_size(cls.m) if x & ~cover == 0]
    if not out:
        raise EmptySeedFamilyError(
            f"no size-{cls.m} subset of the reference cover reaches rank {cls.nu}; "
            "try greedoid seeds"
        )
    return out


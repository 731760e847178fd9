"""Vertex covers: greedy maximal matching and an exact small-graph oracle.

A walker starting outside a vertex cover enters it on the first step, so
every vertex cover is an optimal target set for its own size.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .errors import TooLargeError
from .graph import Graph

__all__ = [
    "MatchingCover",
    "maximal_matching_cover",
    "exact_min_cover",
    "is_vertex_cover",
    "EXACT_COVER_LIMIT",
]

EXACT_COVER_LIMIT = 30


@dataclass(frozen=True)
class MatchingCover:
    matching: tuple[tuple[str, str], ...]
    cover: frozenset[str]

    @property
    def C(self) -> int:
        return len(self.cover)


def _matching_mask(g: Graph) -> tuple[list[tuple[int, int]], int]:
    used = 0
    matched = []
    # g.edges is sorted by (smaller index, larger index) == label order
    for i, j in g.edges:
        if not (used >> i & 1 or used >> j & 1):
            matched.append((i, j))
            used |= (1 << i) | (1 << j)
    return matched, used


def maximal_matching_cover(g: Graph) -> MatchingCover:
    """Greedy maximal matching over edges in label order, and its endpoints.

    The endpoint set covers every edge and is at most twice the size of a
    minimum vertex cover.
    """
    matched, used = _matching_mask(g)
    pairs = tuple((g.labels[i], g.labels[j]) for i, j in matched)
    return MatchingCover(pairs, g.nodeset(used))


def is_vertex_cover(g: Graph, nodes: Iterable) -> bool:
    return g.is_cover_mask(g.mask(nodes))


def _matching_bound(g: Graph, included: int) -> int:
    """Lower bound on extra nodes needed: a greedy matching on uncovered edges."""
    used = 0
    count = 0
    for i, j in g.edges:
        if included >> i & 1 or included >> j & 1:
            continue
        if used >> i & 1 or used >> j & 1:
            continue
        used |= (1 << i) | (1 << j)
        count += 1
    return count


def exact_min_cover(g: Graph, limit: int = EXACT_COVER_LIMIT) -> frozenset[str]:
    """Minimum vertex cover by branch and bound.

    Among covers of minimum size the one with the lexicographically
    smallest sorted label sequence is returned: nodes are decided in label
    order and inclusion is tried before exclusion.
    """
    n = g.n
    if n > limit:
        raise TooLargeError(f"exact_min_cover is limited to N <= {limit}, got N = {n}")
    adj = g.adj_masks

    def search(budget: int) -> int | None:
        def rec(v: int, included: int, excluded: int) -> int | None:
            if included.bit_count() + _matching_bound(g, included) > budget:
                return None
            if v == n:
                return included if g.is_cover_mask(included) else None
            bit = 1 << v
            if included & bit:
                return rec(v + 1, included, excluded)
            found = rec(v + 1, included | bit, excluded)
            if found is not None:
                return found
            # excluding v forces every neighbour in
            if adj[v] & excluded:
                return None
            return rec(v + 1, included | adj[v], excluded | bit)

        return rec(0, 0, 0)

    k = _matching_bound(g, 0)
    while True:
        found = search(k)
        if found is not None:
            return g.nodeset(found)
        k += 1


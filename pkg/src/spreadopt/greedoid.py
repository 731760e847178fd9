"""Greedoid axioms and the greedoid of near-optimal sets.

A family of sets is a greedoid when

* G1: the empty set is feasible,
* G2: every non-empty feasible set has an element whose removal leaves a
  feasible set,
* G3: for feasible X, Y with |X| > |Y| some x in X - Y makes Y + x
  feasible.

The near-optimal class satisfies G3 on its own but not G2: its smallest
sets (size ``m``) have no feasible subsets.  :func:`build_greedoid` adds
a lower part made of subsets of the size-``m`` members, keeps the larger
members that sit above the retained size-``m`` sets, and verifies the
result.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionFailed, EmptySeedFamilyError
from .graph import Graph, bits, iter_bits, label_key
from .ranking import NearOptimalClass

__all__ = [
    "AxiomReport",
    "GreedoidFamily",
    "check_axioms",
    "check_class_g3",
    "build_greedoid",
    "feasible_seeds",
    "family_to_text",
    "family_from_text",
]


@dataclass(frozen=True)
class AxiomReport:
    g1: bool
    g2: bool
    g3: bool
    g2_counterexample: frozenset | None = None
    g3_counterexample: tuple[frozenset, frozenset] | None = None

    @property
    def passed(self) -> bool:
        return self.g1 and self.g2 and self.g3


def _canonical(masks: Iterable[int]) -> list[int]:
    return sorted(masks, key=Graph.set_key)


def _g2_failure(family: set[int], ordered: list[int]) -> int | None:
    for x in ordered:
        if x and not any((x & ~(1 << b)) in family for b in bits(x)):
            return x
    return None


def _augmenters(y: int, family: set[int], universe: int) -> int:
    aug = 0
    for b in bits(universe & ~y):
        if (y | 1 << b) in family:
            aug |= 1 << b
    return aug


def _g3_failure(family: set[int], ordered: list[int], universe: int) -> tuple[int, int] | None:
    """First (X, Y) in canonical order with no augmenting element of X."""
    sizes = [x.bit_count() for x in ordered]
    if universe.bit_length() <= 63:
        arr = np.array(ordered, dtype=np.uint64)
        size_arr = np.array(sizes)
        for y, ny in zip(ordered, sizes):
            aug = np.uint64(_augmenters(y, family, universe))
            bad = np.flatnonzero((size_arr > ny) & ((arr & aug) == 0))
            if bad.size:
                return ordered[bad[0]], y
        return None
    for y, ny in zip(ordered, sizes):
        aug = _augmenters(y, family, universe)
        for x, nx in zip(ordered, sizes):
            if nx > ny and not x & aug:
                return x, y
    return None


def _check_masks(masks: Iterable[int], universe: int):
    family = set(masks)
    ordered = _canonical(family)
    return 0 in family, _g2_failure(family, ordered), _g3_failure(family, ordered, universe)


def check_axioms(family: Iterable[Iterable], ground: Iterable | None = None) -> AxiomReport:
    """Check G1-G3 by direct enumeration; report the first counterexample.

    Elements may be any strings (or objects converted with ``str``).
    """
    sets = [frozenset(str(e) for e in s) for s in family]
    elems = set().union(*sets) if sets else set()
    if ground is not None:
        ground_set = {str(e) for e in ground}
        stray = elems - ground_set
        if stray:
            raise ValueError(f"family uses elements outside the ground set: {sorted(stray)}")
        elems = ground_set
    order = sorted(elems, key=label_key)
    pos = {e: i for i, e in enumerate(order)}

    def to_mask(s):
        return sum(1 << pos[e] for e in s)

    def to_set(m):
        return frozenset(order[i] for i in iter_bits(m))

    g1, g2_bad, g3_bad = _check_masks((to_mask(s) for s in sets), (1 << len(order)) - 1)
    return AxiomReport(
        g1,
        g2_bad is None,
        g3_bad is None,
        None if g2_bad is None else to_set(g2_bad),
        None if g3_bad is None else (to_set(g3_bad[0]), to_set(g3_bad[1])),
    )


def check_class_g3(cls: NearOptimalClass) -> tuple[bool, tuple[frozenset, frozenset] | None]:
    """Augmentation property among the members of a near-optimal class.

    This always holds in exact arithmetic; a counterexample points at a bug
    or at numerical trouble, and is returned rather than hidden.
    """
    g = cls.graph
    family = set(cls.masks)
    bad = _g3_failure(family, list(cls.masks), g.full_mask)
    if bad is None:
        return True, None
    return False, (g.nodeset(bad[0]), g.nodeset(bad[1]))


@dataclass(frozen=True)
class GreedoidFamily:
    ground: tuple[str, ...]
    m: int
    masks: tuple[int, ...]
    provenance: dict[int, str] = field(compare=False)
    report: AxiomReport
    rejected: tuple[frozenset[str], ...] = ()
    culled_lower: int = 0
    graph: Graph = field(default=None, repr=False, compare=False)

    @property
    def feasible(self) -> tuple[frozenset[str], ...]:
        return tuple(self.graph.nodeset(x) for x in self.masks)

    def of_size(self, n: int) -> tuple[int, ...]:
        return tuple(x for x in self.masks if x.bit_count() == n)

    def __len__(self) -> int:
        return len(self.masks)

    def to_text(self) -> str:
        return family_to_text(self.graph, self.masks)


def _disjoint_test(masks: set[int], universe: int):
    """Predicate: does some set in ``masks`` miss every bit of its argument?"""
    if universe.bit_length() <= 63:
        arr = np.fromiter(masks, dtype=np.uint64, count=len(masks))
        return lambda aug: bool(((arr & np.uint64(aug)) == 0).any())
    return lambda aug: any(not x & aug for x in masks)


def _lower_part(tops: list[int], m: int) -> tuple[dict[int, set[int]], int] | None:
    """Largest lower family the cull loop leaves under ``tops``.

    Starts from every subset of every top set and repeatedly drops sets
    that break accessibility (G2) or cannot be augmented into the next
    level (G3).  With G2 in place, augmentation between adjacent levels
    implies it between all levels.  Returns None when a top set or the
    empty set would have to go.
    """
    levels: dict[int, set[int]] = {m: set(tops)}
    for n in range(m - 1, -1, -1):
        levels[n] = {x & ~(1 << b) for x in levels[n + 1] for b in bits(x)} if n else {0}
    start = sum(len(levels[n]) for n in range(1, m))
    universe = 0
    for t in tops:
        universe |= t

    changed = True
    while changed:
        changed = False
        for n in range(1, m + 1):
            below = levels[n - 1]
            bad = {x for x in levels[n] if not any((x & ~(1 << b)) in below for b in bits(x))}
            if bad:
                if n == m:
                    return None
                levels[n] -= bad
                changed = True
        for n in range(m):
            above = levels[n + 1]
            if not above:
                continue
            hits = _disjoint_test(above, universe)
            bad = {y for y in levels[n] if hits(_augmenters(y, above, universe))}
            if bad:
                if n == 0:
                    return None
                levels[n] -= bad
                changed = True
    kept = sum(len(levels[n]) for n in range(1, m))
    return levels, start - kept


def build_greedoid(cls: NearOptimalClass) -> GreedoidFamily:
    """Greedoid on subsets and supersets of the smallest class members.

    Size-``m`` members are taken in label order and kept when the lower
    part below all kept sets still survives the cull loop; rejected ones
    are listed in ``rejected``.  Feasible sets above size ``m`` are the
    class members containing a kept size-``m`` set (every such superset
    within the cap is a member, so G2 and G3 carry over from the kept
    sets).  The result is verified with :func:`check_axioms`.
    """
    g = cls.graph
    m = cls.m
    base = list(cls.of_size(m))
    if not base:
        raise ConstructionFailed(f"class has no members of size m = {m}")

    kept: list[int] = []
    rejected: list[int] = []
    lower: dict[int, set[int]] = {}
    culled = 0
    for b in base:
        res = _lower_part(kept + [b], m)
        if res is None:
            rejected.append(b)
        else:
            kept.append(b)
            lower, culled = res
    if not kept:
        raise ConstructionFailed("no size-m member admits an accessible lower family", rejected)

    provenance = {0: "empty"}
    for n in range(1, m):
        for x in lower[n]:
            provenance[x] = "augmentable"
    for x in kept:
        provenance[x] = "base"
    for x in cls.masks:
        if x.bit_count() > m and any(x & k == k for k in kept):
            provenance[x] = "upper"

    masks = tuple(_canonical(provenance))
    g1, g2_bad, g3_bad = _check_masks(masks, g.full_mask)
    report = AxiomReport(
        g1,
        g2_bad is None,
        g3_bad is None,
        None if g2_bad is None else g.nodeset(g2_bad),
        None if g3_bad is None else (g.nodeset(g3_bad[0]), g.nodeset(g3_bad[1])),
    )
    if not report.passed:
        raise ConstructionFailed("constructed family violates the greedoid axioms", report)
    return GreedoidFamily(
        ground=g.labels,
        m=m,
        masks=masks,
        provenance=provenance,
        report=report,
        rejected=tuple(g.nodeset(x) for x in rejected),
        culled_lower=culled,
        graph=g,
    )


def feasible_seeds(fam: GreedoidFamily, m: int | None = None) -> list[frozenset[str]]:
    """Feasible sets of size ``m`` (default: the family's base size)."""
    size = fam.m if m is None else m
    out = [fam.graph.nodeset(x) for x in fam.of_size(size)]
    if not out:
        raise EmptySeedFamilyError(f"greedoid has no feasible sets of size {size}")
    return out


def family_to_text(g: Graph, masks: Iterable[int]) -> str:
    """One set per line, labels comma-separated, canonical order.

    The empty set is an empty line.
    """
    return "".join(",".join(g.labels_of(x)) + "\n" for x in _canonical(masks))


def family_from_text(text: str) -> list[frozenset[str]]:
    return [frozenset(filter(None, line.split(","))) for line in text.split("\n")[:-1]]

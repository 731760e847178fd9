"""Elemental curvature of the rank and the quality/effort trade-off.

With ``gain_i(S) = rank(S + i) - rank(S)`` the elemental curvature is the
largest ratio ``gain_i(S + j) / gain_i(S)``.  Along any chain from ``S`` to
a rank-1 set ``T`` with ``r = |T - S|`` this gives::

    rank(S) >= 1 - gamma * (1 + kappa + ... + kappa**(r - 1))

where ``gamma`` bounds single-node gains inside ``T``.  Reading the bound
backwards gives the largest ``r`` that still guarantees quality ``nu``
and hence the smallest usable seed size ``m = C - r``.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations

from .errors import BudgetExceededError, NoValidPairsError, RankNotOneError
from .graph import iter_bits
from .ranking import ENUMERATION_BUDGET, NearOptimalClass, RankContext

__all__ = [
    "CurvatureReport",
    "TradeoffResult",
    "elemental_curvature",
    "gamma_max_marginal",
    "geometric_sum",
    "rank_lower_bound",
    "tradeoff",
    "tradeoff_table",
    "chain_marginals",
    "ZERO_GAIN",
]

ZERO_GAIN = 1e-12


@dataclass(frozen=True)
class CurvatureReport:
    kappa: float
    domain: str
    samples: int
    skipped: int
    argmax: tuple[frozenset[str], str, str]
    extended: bool
    domain_note: str
    gamma: float | None = None


def _ratios(ctx: RankContext, bases: Iterable[int], n: int):
    full = (1 << n) - 1
    rho = ctx.rank_mask
    for s in bases:
        free = list(iter_bits(full & ~s))
        if len(free) < 2:
            continue
        r_s = rho(s)
        gain = {i: rho(s | 1 << i) - r_s for i in free}
        for j in free:
            s_j = s | 1 << j
            r_sj = rho(s_j)
            for i in free:
                if i == j:
                    continue
                yield s, i, j, rho(s_j | 1 << i) - r_sj, gain[i]


def elemental_curvature(
    cls: NearOptimalClass, domain: str = "members", budget: int = ENUMERATION_BUDGET
) -> CurvatureReport:
    """Largest ratio of one-node rank gains before and after adding another node.

    ``domain="members"`` ranges the base set over class members,
    ``domain="all"`` over every non-empty node set.  The empty base is
    never used.  Pairs whose base gain is below ``ZERO_GAIN`` are skipped
    and counted.
    """
    ctx = cls.ctx
    g = ctx.graph
    if domain == "members":
        bases: Iterable[int] = cls.masks
    elif domain == "all":
        if 1 << g.n > budget:
            raise BudgetExceededError(f"2^{g.n} base sets exceed the budget {budget}", 1 << g.n)
        bases = range(1, 1 << g.n)
    else:
        raise ValueError(f"domain must be 'members' or 'all', got {domain!r}")

    best, arg = -math.inf, None
    samples = skipped = 0
    for s, i, j, num, den in _ratios(ctx, bases, g.n):
        if den <= ZERO_GAIN:
            skipped += 1
            continue
        samples += 1
        ratio = num / den
        if ratio > best:
            best, arg = ratio, (s, i, j)
    if arg is None:
        raise NoValidPairsError(f"no base set with two free nodes and a positive gain ({skipped} skipped)")
    s, i, j = arg
    extended = s.bit_count() + 2 > ctx.C
    note = "empty base excluded; ranks of sets larger than C use the unclipped formula"
    return CurvatureReport(
        kappa=best,
        domain=domain,
        samples=samples,
        skipped=skipped,
        argmax=(g.nodeset(s), g.labels[i], g.labels[j]),
        extended=extended,
        domain_note=note,
    )


def gamma_max_marginal(
    ctx: RankContext, T: Iterable, min_size: int = 1, budget: int = ENUMERATION_BUDGET
) -> tuple[float, tuple[frozenset[str], str]]:
    """Largest single-node rank gain ``rank(S + j) - rank(S)`` inside ``T``.

    ``S`` ranges over proper subsets of ``T`` with at least ``min_size``
    nodes and ``j`` over ``T - S``.  ``T`` must have rank 1.
    """
    g = ctx.graph
    t = g.mask(T)
    rt = ctx.rank_mask(t)
    if abs(rt - 1.0) > 1e-9:
        raise RankNotOneError(f"reference set has rank {rt!r}, expected 1")
    if 1 << t.bit_count() > budget:
        raise BudgetExceededError(f"2^{t.bit_count()} subsets exceed the budget {budget}")
    idx = list(iter_bits(t))
    best, arg = -math.inf, None
    for k in range(max(min_size, 0), len(idx)):
        for combo in combinations(idx, k):
            s = sum(1 << i for i in combo)
            r_s = ctx.rank_mask(s)
            for j in idx:
                if s >> j & 1:
                    continue
                gain = ctx.rank_mask(s | 1 << j) - r_s
                if gain > best:
                    best, arg = gain, (s, j)
    if arg is None:
        raise NoValidPairsError("reference set too small for the requested min_size")
    return best, (g.nodeset(arg[0]), g.labels[arg[1]])


def chain_marginals(ctx: RankContext, S: Iterable, order: Sequence) -> list[float]:
    """Rank gain of each node of ``order`` when added after the ones before it."""
    g = ctx.graph
    mask = g.mask(S)
    out = []
    for lab in order:
        bit = 1 << g.index(lab)
        out.append(ctx.rank_mask(mask | bit) - ctx.rank_mask(mask))
        mask |= bit
    return out


def geometric_sum(kappa: float, r: int) -> float:
    """``1 + kappa + ... + kappa**(r - 1)``; stable for kappa near 1."""
    if r <= 0:
        return 0.0
    if kappa == 0:
        return 1.0
    if abs(kappa - 1.0) <= 1e-12:
        return float(r)
    return -math.expm1(r * math.log(kappa)) / (1.0 - kappa)


def rank_lower_bound(gamma: float, kappa: float, r: int) -> float:
    if gamma < 0 or kappa < 0 or r < 0:
        raise ValueError("gamma, kappa and r must be non-negative")
    return 1.0 - gamma * geometric_sum(kappa, r)


@dataclass(frozen=True)
class TradeoffResult:
    gamma: float
    kappa: float
    C: int
    nu: float
    r_of_nu: int
    m_of_nu: int
    curve: tuple[float, ...]

    def bound_value(self, r: int) -> float:
        return rank_lower_bound(self.gamma, self.kappa, r)

    def quality_for_m(self, m: int) -> float:
        """Guaranteed quality when seeds have size ``m``."""
        return self.bound_value(self.C - m)


def tradeoff(gamma: float, kappa: float, C: int, nu: float) -> TradeoffResult:
    """Largest ``r <= C`` whose bound still reaches ``nu``, and ``m = C - r``."""
    if not 0 < nu <= 1:
        raise ValueError(f"nu must lie in (0, 1], got {nu}")
    curve = tuple(rank_lower_bound(gamma, kappa, r) for r in range(C + 1))
    r_best = 0
    for r in range(1, C + 1):
        if curve[r] < nu - 1e-12:
            break
        r_best = r
    return TradeoffResult(gamma, kappa, C, nu, r_best, C - r_best, curve)


def tradeoff_table(gamma: float, kappa: float, C: int, nus: Iterable[float]) -> list[TradeoffResult]:
    return [tradeoff(gamma, kappa, C, nu) for nu in nus]


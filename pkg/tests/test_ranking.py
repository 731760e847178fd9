from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spreadopt import Objective, enumerate_class, marginal_gain, parse_graph, rank, rank_context
from spreadopt.errors import BudgetExceededError, DegenerateRankError, NoCoverError, UnknownNodeError
from strategies import connected_graphs


def test_context_path(p3):
    ctx = rank_context(p3)
    assert ctx.cover == {"1", "2"} and ctx.C == 2
    assert ctx.fmin == pytest.approx(1)
    assert ctx.fmax == pytest.approx(7)
    assert ctx.worst == "1"


def test_context_star(s3):
    ctx = rank_context(s3)
    assert ctx.cover == {"0", "1"}
    assert (ctx.fmin, ctx.fmax) == pytest.approx((2, 17))


def test_context_edge_not_degenerate(k2):
    ctx = rank_context(k2)
    assert (ctx.fmin, ctx.fmax) == (0.0, 1.0)


def test_context_degenerate(k2):
    with pytest.raises(DegenerateRankError):
        rank_context(k2, C=1)


def test_context_padding_and_exact(p3, c4):
    padded = rank_context(p3, C=3)
    assert padded.cover == {"1", "2", "3"} and padded.cover_source == "matching+padding"
    small = rank_context(p3, C=1)
    assert small.cover == {"2"} and small.cover_source == "exact"
    with pytest.raises(NoCoverError):
        rank_context(c4, C=1)
    with pytest.raises(ValueError):
        rank_context(p3, C=0)


def test_rank_examples(p3):
    ctx = rank_context(p3)
    assert rank(ctx, {"2"}) == pytest.approx(5 / 6)
    assert rank(ctx, {"1", "2"}) == pytest.approx(1)
    assert rank(ctx, {"3"}) == pytest.approx(0)
    assert rank(ctx, set()) == 0.0
    with pytest.raises(UnknownNodeError):
        rank(ctx, {"4"})


def test_marginal_gain_examples(p3):
    ctx = rank_context(p3)
    assert marginal_gain(ctx, {"2"}, "1") == pytest.approx(1 / 6)
    # the full node set ranks above 1 under the unclipped formula
    assert marginal_gain(ctx, {"2", "3"}, "1") == pytest.approx(1 / 6)
    assert marginal_gain(ctx, set(), "2") == pytest.approx(5 / 6)
    with pytest.raises(ValueError):
        marginal_gain(ctx, {"2"}, "2")


def test_class_examples(p3, s3):
    cls = enumerate_class(p3, 0.8)
    assert set(cls.members) == {frozenset(s) for s in ({"2"}, {"1", "2"}, {"2", "3"}, {"1", "3"})}
    assert cls.m == 1
    assert cls.members[0] == {"2"}
    top = enumerate_class(p3, 1.0)
    assert set(top.members) == {frozenset(s) for s in ({"1", "2"}, {"2", "3"}, {"1", "3"})}
    assert top.m == 2
    star = enumerate_class(s3, 1.0)
    assert set(star.members) == {frozenset({"0", x}) for x in "123"}
    assert {"0", "2"} in star and {"1", "2"} not in star


def test_class_budget_gate():
    g = parse_graph("".join(f"{i} {i + 1}\n" for i in range(30)))
    with pytest.raises(BudgetExceededError) as info:
        enumerate_class(g, 0.9)
    assert info.value.exit_code == 3
    assert info.value.count > 10**7


def test_class_rejects_bad_nu(p3):
    for nu in (0, -0.1, 1.5):
        with pytest.raises(ValueError):
            enumerate_class(p3, nu)


@given(connected_graphs(min_n=3, max_n=7, weighted=False), st.sampled_from([0.3, 0.5, 0.8, 0.9, 1.0]))
@settings(max_examples=50, deadline=None)
def test_class_invariants(g, nu):
    ctx = rank_context(g)
    cls = enumerate_class(g, nu, ctx=ctx)
    obj = Objective(g)
    # membership is exactly the threshold test over all sets of size <= C
    for k in range(1, ctx.C + 1):
        for combo in combinations(g.labels, k):
            r = (ctx.fmax - obj.of(combo)) / (ctx.fmax - ctx.fmin)
            assert (frozenset(combo) in set(cls.members)) == (r >= nu - 1e-9)
    # ranks lie in [0, 1] within the cap, and the cover ranks 1
    assert all(-1e-9 <= r <= 1 + 1e-9 for r in cls.ranks.values())
    assert ctx.rank(ctx.cover) == pytest.approx(1)
    # m is pinned by the running best rank
    assert cls.level_max[cls.m] >= nu - 1e-9
    assert cls.m == 1 or cls.level_max[cls.m - 1] < nu - 1e-9
    # upward closure within the cap
    members = set(cls.masks)
    for x in cls.masks:
        if x.bit_count() < ctx.C:
            for j in range(g.n):
                assert (x | 1 << j) in members

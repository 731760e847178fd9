from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import exact_hitting, random_corpus
from spreadopt import Objective, hitting_times, mc_hitting, parse_graph, spread_objective
from spreadopt.errors import EmptyTargetError, StepCapExceeded, UnknownNodeError
from strategies import connected_graphs, graph_and_mask


def test_path_neighbours_of_target(p3):
    assert hitting_times(p3, {"2"}).times == {"1": 1.0, "3": 1.0}


def test_path_end_target(p3):
    h = hitting_times(p3, {"1"}).times
    assert h["2"] == pytest.approx(3, abs=1e-12)
    assert h["3"] == pytest.approx(4, abs=1e-12)


def test_star_leaf_target(s3):
    prof = hitting_times(s3, {"1"})
    assert prof.times["0"] == pytest.approx(5, abs=1e-12)
    assert prof.times["2"] == pytest.approx(6, abs=1e-12)
    assert prof.times["3"] == pytest.approx(6, abs=1e-12)
    assert prof.total == pytest.approx(17, abs=1e-12)


def test_cycle_single_target(c4):
    assert spread_objective(c4, {"1"}) == pytest.approx(10, abs=1e-12)


def test_full_target_is_zero(k3):
    assert spread_objective(k3, {"1", "2", "3"}) == 0.0
    assert hitting_times(k3, {"1", "2", "3"}).times == {}


def test_errors(p3):
    with pytest.raises(EmptyTargetError):
        hitting_times(p3, set())
    with pytest.raises(UnknownNodeError):
        spread_objective(p3, {"7"})
    with pytest.raises(ValueError):
        spread_objective(p3, {"1"}, method="bogus")


def test_cycle_closed_form():
    # on C_n the walk from distance d hits a single node after d(n-d) steps
    n = 9
    g = parse_graph("".join(f"{i} {(i + 1) % n}\n" for i in range(n)))
    h = hitting_times(g, {"0"}).times
    for d in range(1, n):
        assert h[str(d)] == pytest.approx(d * (n - d), rel=1e-12)


@pytest.mark.parametrize("g", random_corpus()[:25], ids=lambda g: repr(g))
def test_against_rational_oracle(g):
    for k in (1, 2):
        for combo in list(combinations(g.labels, k))[:6]:
            exact = exact_hitting(g, set(combo))
            got = hitting_times(g, combo).times
            assert got.keys() == exact.keys()
            for v, val in exact.items():
                assert got[v] == pytest.approx(float(val), rel=1e-10, abs=1e-10)


def test_weighted_against_oracle():
    g = parse_graph("1 2 0.5\n2 3 2\n3 4 1\n4 1 3\n1 3 0.25\n")
    exact = exact_hitting(g, {"2"})
    got = hitting_times(g, {"2"}).times
    for v in exact:
        assert got[v] == pytest.approx(float(exact[v]), rel=1e-12)


@pytest.mark.parametrize("method", ["dense", "sparse", "fixed_point"])
def test_solver_routes_agree(method):
    g = random_corpus()[7]
    ref = exact_hitting(g, {g.labels[0]})
    got = hitting_times(g, {g.labels[0]}, method=method).times
    for v in ref:
        assert got[v] == pytest.approx(float(ref[v]), rel=1e-8)


def test_sparse_route_on_large_path():
    n = 3000
    g = parse_graph("".join(f"{i} {i + 1}\n" for i in range(n - 1)))
    h = hitting_times(g, {"0"}).times
    # path end target: h(d) = d(2(n-1) - d)
    for d in (1, 10, n - 1):
        assert h[str(d)] == pytest.approx(d * (2 * (n - 1) - d), rel=1e-9)


def test_objective_memoizes(s3):
    obj = Objective(s3)
    assert obj.of({"1"}) == pytest.approx(17)
    obj.of({"1"})
    assert obj.evaluations == 1


@given(graph_and_mask(max_n=7))
@settings(max_examples=60, deadline=None)
def test_hitting_times_at_least_one(gm):
    g, mask = gm
    h = hitting_times(g, g.labels_of(mask)).times
    assert all(v >= 1 - 1e-12 for v in h.values())


@given(graph_and_mask(max_n=7))
@settings(max_examples=60, deadline=None)
def test_neighbour_recursion(gm):
    # h(i) = 1 + sum_j p(i, j) h(j) with h = 0 on the target
    g, mask = gm
    h = hitting_times(g, g.labels_of(mask)).times
    p = g.dense_transition()
    for i in range(g.n):
        if mask >> i & 1:
            continue
        rhs = 1 + sum(p[i, j] * h.get(g.labels[j], 0.0) for j in g.neighbors[i])
        assert h[g.labels[i]] == pytest.approx(rhs, rel=1e-9)


@given(graph_and_mask(max_n=7, weighted=False))
@settings(max_examples=40, deadline=None)
def test_cover_targets_hit_in_one_step(gm):
    g, mask = gm
    if g.is_cover_mask(mask):
        assert spread_objective(g, g.labels_of(mask)) == pytest.approx(g.n - mask.bit_count(), abs=1e-9)


@given(connected_graphs(max_n=6), st.data())
@settings(max_examples=40, deadline=None)
def test_adding_a_node_lowers_objective_by_at_least_one(g, data):
    mask = data.draw(st.integers(1, g.full_mask))
    free = [i for i in range(g.n) if not mask >> i & 1]
    if not free:
        return
    j = data.draw(st.sampled_from(free))
    obj = Objective(g)
    assert obj(mask) - obj(mask | 1 << j) >= 1 - 1e-9


# --- Monte Carlo ------------------------------------------------------------


def test_mc_deterministic_first_step(p3):
    est = mc_hitting(p3, {"2"}, "3", walks=500, seed=11)
    assert est.mean == 1.0
    assert est.stderr == 0.0


@pytest.mark.parametrize(
    "name, target, start, exact", [("P3", "1", "2", 3.0), ("S3", "1", "0", 5.0), ("C4", "1", "3", 4.0)]
)
def test_mc_matches_solver(graphs, name, target, start, exact):
    est = mc_hitting(graphs[name], {target}, start, walks=100_000, seed=3)
    assert abs(est.mean - exact) <= 3 * est.stderr


def test_mc_reproducible_and_block_independent(s3):
    a = mc_hitting(s3, {"1"}, "2", walks=5000, seed=42, block_size=5000)
    b = mc_hitting(s3, {"1"}, "2", walks=5000, seed=42, block_size=5000)
    assert a == b
    c = mc_hitting(s3, {"1"}, "2", walks=5000, seed=43)
    assert c != a


def test_mc_step_cap_reports_partial():
    n = 40
    g = parse_graph("".join(f"{i} {i + 1}\n" for i in range(n - 1)))
    with pytest.raises(StepCapExceeded) as info:
        mc_hitting(g, {"0"}, str(n - 1), walks=200, seed=0, step_cap=50)
    assert info.value.exit_code == 4


def test_mc_input_checks(p3):
    with pytest.raises(ValueError):
        mc_hitting(p3, {"1"}, "1")
    with pytest.raises(EmptyTargetError):
        mc_hitting(p3, set(), "1")
    with pytest.raises(ValueError):
        mc_hitting(p3, {"1"}, "2", walks=0)

import itertools
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from throttlekit.bounds import certify, lower_bound_eval, realize, spider_lower_family
from throttlekit.decomposition import CoverPlan, plan_cover
from throttlekit.graph import (
    Graph,
    GraphError,
    center_and_radius,
    complete,
    cycle,
    distance_matrix,
    induced_subgraph,
    is_tree,
    path,
    random_cactus,
    random_spider,
    random_tree,
    spider,
    star,
)
from throttlekit.solvers import capture_time
from throttlekit.strategies import (
    cactus_flatten,
    cactus_plan,
    confined_capture_check,
    guard_separation_ok,
    pursuit_bound,
    spider_cover,
    spider_legs,
    stationary_escape,
    tree_pursuit,
)


def one_region(g):
    return CoverPlan([list(range(g.n))], [0], 1, "small_b", {})


def test_pursuit_p5():
    tr = tree_pursuit(path(5), one_region(path(5)), "greedy_far")
    assert tr.captured and tr.rounds <= 2
    assert tr.rounds == capture_time(path(5), 1).rounds


def test_pursuit_stationary_on_cop():
    t = random_tree(40, 2)
    plan = plan_cover(t, 0.5)
    start_cops = tree_pursuit(t, plan).history[0][0]
    tr = tree_pursuit(t, plan, "stationary", start=start_cops[0])
    assert tr.rounds == 0 and tr.captured and tr.region_of_capture == 0


def _check_trace(t, tr):
    d = distance_matrix(t)
    for (c0, r0), (c1, r1) in zip(tr.history, tr.history[1:]):
        assert all(a == b or d[a, b] == 1 for a, b in zip(c0, c1))
        assert r0 == r1 or d[r0, r1] == 1
        # every cop closes in: distance after its move is one less (or capture)
        assert all(d[b, r0] == max(0, d[a, r0] - 1) for a, b in zip(c0, c1))
    if tr.captured:
        cops, r = tr.history[-1]
        assert r in cops


def test_pursuit_random_tree_200():
    t = random_tree(200, 3)
    plan = plan_cover(t, 0.5)
    tr = tree_pursuit(t, plan, "greedy_far")
    assert tr.captured
    assert tr.rounds <= math.ceil(plan.max_region / 2)
    assert tr.rounds <= pursuit_bound(t, plan)
    _check_trace(t, tr)
    assert json.loads(tr.to_json())["rounds"] == tr.rounds


@settings(max_examples=40, deadline=None)
@given(st.integers(9, 120), st.integers(0, 2**31), st.integers(0, 10**6),
       st.sampled_from(["greedy_far", "stationary"]))
def test_pursuit_bound_property(n, seed, start, policy):
    t = random_tree(n, seed)
    plan = plan_cover(t, 0.5)
    tr = tree_pursuit(t, plan, policy, start=start % n)
    assert tr.captured and tr.rounds <= pursuit_bound(t, plan) <= math.ceil(plan.max_region / 2)
    _check_trace(t, tr)


@pytest.mark.parametrize("n", range(2, 16))
def test_exact_best_single_region_matches_solver(n):
    g = path(n)
    tr = tree_pursuit(g, one_region(g), "exact_best")
    assert tr.rounds == capture_time(g, 1).rounds


@pytest.mark.parametrize("seed", range(6))
def test_exact_best_random(seed):
    t = random_tree(20, seed)
    plan = plan_cover(t, 0.5)
    best = tree_pursuit(t, plan, "exact_best")
    greedy = tree_pursuit(t, plan, "greedy_far")
    assert best.captured and greedy.rounds <= best.rounds <= pursuit_bound(t, plan)
    _check_trace(t, best)


def test_pursuit_errors():
    with pytest.raises(GraphError):
        tree_pursuit(cycle(4), one_region(cycle(4)))
    with pytest.raises(GraphError):
        tree_pursuit(path(4), CoverPlan([[0, 1]], [0], 1, "small_b"))
    with pytest.raises(GraphError):
        tree_pursuit(path(4), CoverPlan([[0, 2], [1, 3]], [0, 1], 2, "small_b"))
    with pytest.raises(ValueError):
        tree_pursuit(path(4), one_region(path(4)), "teleport")


def test_spider_cover_tiny():
    plan = spider_cover(spider([1, 1, 1]))
    assert plan.cop_count == 1 and plan.regions == [[0, 1, 2, 3]]
    assert plan.diagnostics["capture_bound"] == 1


def test_spider_cover_balanced_401():
    sp = spider([40] * 10)
    plan = spider_cover(sp)
    d = plan.diagnostics
    assert d["interval"] == 23 and d["b"] == 10 and d["subcase"] == "small_b"
    assert plan.cop_count == 10 + 1 + 10
    assert certify(sp, plan, 0.5).verdict == "PASS"


def _spider_regions_ok(sp, plan):
    center, legs = spider_legs(sp)
    leg_of = {v: i for i, leg in enumerate(legs) for v in leg}
    cov = set()
    for reg in plan.regions:
        cov |= set(reg)
        if center in reg:
            continue
        legs_hit = {leg_of[v] for v in reg}
        assert len(legs_hit) == 1
        leg = legs[legs_hit.pop()]
        pos = sorted(leg.index(v) for v in reg)
        assert pos == list(range(pos[0], pos[-1] + 1))
    assert cov == set(range(sp.n))
    r = math.sqrt(4 / 3)
    n_int = plan.diagnostics["intervals"]
    expect = n_int + 1 + (plan.diagnostics["b"] if plan.diagnostics["subcase"] == "small_b" else 0)
    assert plan.cop_count == expect == len(plan.regions)


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 3000), st.integers(0, 2**31))
def test_spider_cover_properties(n, seed):
    sp = random_spider(n, seed)
    plan = spider_cover(sp)
    _spider_regions_ok(sp, plan)
    assert certify(sp, plan, 0.5).verdict == "PASS"


@pytest.mark.parametrize("n", [5, 9, 16, 25])
def test_spider_cover_path(n):
    g = path(n)
    plan = spider_cover(g)
    assert plan.diagnostics["center"] == 0
    _spider_regions_ok(g, plan)
    r = math.sqrt(4 / 3)
    for reg in plan.regions:
        sub, _ = induced_subgraph(g, reg)
        rounds = capture_time(sub, 1).rounds
        assert rounds <= 0.5 * r * math.sqrt(n) + 1
        assert rounds == center_and_radius(sub)[1]
    tr = tree_pursuit(g, plan, "exact_best")
    assert tr.rounds <= plan.diagnostics["capture_bound"]


def test_spider_legs_rejects():
    with pytest.raises(GraphError):
        spider_legs(cycle(5))
    with pytest.raises(GraphError):
        spider_legs(Graph.from_edges(8, [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (4, 6), (4, 7)]))


def test_flatten_triangle():
    fr = cactus_flatten(cycle(3))
    assert fr.fiber == [(0,), (1,), (2,)]
    # entry 0 is v_2; its smaller neighbour 1 is v_3 in the middle
    assert sorted(fr.tree.edges()) == [(0, 1), (1, 2)]
    assert fr.bypass == [(1, (2, 0))]


def test_flatten_c4():
    fr = cactus_flatten(cycle(4))
    assert fr.fiber == [(0,), (1, 3), (2,)]
    assert sorted(fr.tree.edges()) == [(0, 1), (1, 2)]


def test_flatten_tree_identity():
    t = random_tree(30, 9)
    fr = cactus_flatten(t)
    assert fr.tree == t and all(len(f) == 1 for f in fr.fiber)


def test_flatten_rejects_non_cactus():
    with pytest.raises(GraphError):
        cactus_flatten(complete(4))


def _flatten_ok(g, fr):
    assert is_tree(fr.tree)
    assert sum(len(f) for f in fr.fiber) == g.n
    assert all(1 <= len(f) <= 2 for f in fr.fiber)
    assert sorted(v for f in fr.fiber for v in f) == list(range(g.n))
    assert all(v in fr.fiber[fr.anchor_map[v]] for v in range(g.n))
    mids = {frozenset(fr.anchor_map[x] for x in e): m for m, e in fr.bypass}
    for a, b in g.edges():
        na, nb = fr.anchor_map[a], fr.anchor_map[b]
        assert na != nb
        if nb not in fr.tree.adj[na]:
            m = mids[frozenset((na, nb))]
            assert na in fr.tree.adj[m] and nb in fr.tree.adj[m]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 400), st.integers(0, 2**31), st.floats(0, 1))
def test_flatten_properties(n, seed, p):
    from throttlekit.graph import random_cactus as rc

    g = rc(n, seed, p_cycle=p)
    _flatten_ok(g, cactus_flatten(g))


def test_flatten_dot():
    assert "graph T_G" in cactus_flatten(cycle(6)).to_dot()


def test_cactus_plan_c4():
    plan = cactus_plan(cycle(4))
    assert len(plan.regions) == 1 and len(plan.diagnostics["guards"]) <= 2
    assert guard_separation_ok(cycle(4), plan)
    assert all(r["ok"] for r in confined_capture_check(cycle(4), plan))


def test_cactus_plan_1000():
    g = random_cactus(1000, 2)
    plan = cactus_plan(g)
    assert plan.cop_count <= 16 * math.sqrt(1000) + 16
    assert plan.max_region <= 2 * (2 * math.sqrt(1000) + 2)
    assert guard_separation_ok(g, plan)
    assert certify(g, plan, 0.5).verdict == "PASS"


def test_cactus_plan_tree_input():
    t = random_tree(100, 4)
    plan = cactus_plan(t)
    assert guard_separation_ok(t, plan)
    # singleton fibers: regions are subtrees
    for reg in plan.regions:
        assert len(center_and_radius(t, reg)[0]) >= 1


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 600), st.integers(0, 2**31), st.floats(0.2, 1))
def test_cactus_plan_properties(n, seed, p):
    from throttlekit.graph import random_cactus as rc

    g = rc(n, seed, p_cycle=p)
    plan = cactus_plan(g)
    assert guard_separation_ok(g, plan)
    assert plan.cop_count <= 16 * math.sqrt(n) + 16


def test_bypass_guard_needed():
    # when an odd cycle's inserted middle vertex is an anchor, the cycle edge
    # jumping over it links two regions unless one endpoint is guarded
    with_extra = broken = 0
    for seed in range(200):
        g = random_cactus(60, seed, p_cycle=0.9)
        plan = cactus_plan(g)
        assert guard_separation_ok(g, plan)
        extra = plan.diagnostics["bypass_guards"]
        if extra:
            with_extra += 1
            diag = dict(plan.diagnostics, guards=sorted(set(plan.diagnostics["guards"]) - set(extra)))
            weaker = CoverPlan(plan.regions, plan.anchors, plan.cop_count, "cactus", diag)
            broken += not guard_separation_ok(g, weaker)
    assert with_extra > 0 and broken > 0


def test_stationary_escape():
    g = path(9)
    assert stationary_escape(g, range(9)) == 0
    assert stationary_escape(g, [0]) == 8
    t = random_tree(50, 1)
    centers, rad = center_and_radius(t)
    assert stationary_escape(t, [centers[0]]) == rad
    assert all(stationary_escape(t, [v]) >= rad for v in range(50))
    with pytest.raises(GraphError):
        stationary_escape(g, [])


@pytest.mark.parametrize("n", range(4, 19))
def test_stationary_escape_lower_spider(n):
    g = realize(spider_lower_family(n))
    lb = lower_bound_eval(spider_lower_family(n))
    for k in range(1, 4):
        for cops in itertools.combinations(range(n), k):
            assert stationary_escape(g, cops) >= lb - k


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 300), st.integers(0, 2**31), st.integers(0, 10**6))
def test_lifting_backend_matches_matrix(n, seed, start):
    # large trees switch from the distance matrix to ancestor jump tables
    import throttlekit.strategies as strat

    t = random_tree(n, seed)
    plan = plan_cover(t, 0.5) if n >= 9 else one_region(t)
    small = tree_pursuit(t, plan, "greedy_far", start=start % n)
    old = strat._MATRIX_LIMIT
    strat._MATRIX_LIMIT = 0
    try:
        big = tree_pursuit(t, plan, "greedy_far", start=start % n)
        free = tree_pursuit(t, plan, "greedy_far")
    finally:
        strat._MATRIX_LIMIT = old
    assert small.history == big.history
    assert free.history == tree_pursuit(t, plan, "greedy_far").history

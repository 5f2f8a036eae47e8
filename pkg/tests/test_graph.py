import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from throttlekit.graph import (
    Graph,
    GraphError,
    ParseError,
    biconnected_blocks,
    center_and_radius,
    complete,
    components,
    cycle,
    distance_matrix,
    generate,
    is_cactus,
    is_tree,
    nonisomorphic_trees,
    parse_family,
    parse_graph,
    path,
    random_cactus,
    random_chordal,
    random_spider,
    random_tree,
    spanning_tree,
    spider,
    star,
    to_dot,
    to_edge_list,
    to_graph6,
    tree_center,
)

from oracles import to_nx


@st.composite
def graphs(draw, max_n=20):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


def test_edge_list_path():
    g = parse_graph("0 1\n1 2")
    assert g.n == 3 and g.edges() == [(0, 1), (1, 2)]


def test_edge_list_comments_labels_isolated():
    g = parse_graph("# header\na b  # trailing\nb c\nz\n")
    assert g.n == 4 and g.labels == ("a", "b", "c", "z")
    assert g.adj[3] == ()


def test_self_loop_rejected_with_line():
    with pytest.raises(ParseError) as e:
        parse_graph("0 1\n0 0")
    assert e.value.line == 2


def test_malformed_line():
    with pytest.raises(ParseError):
        parse_graph("0 1 2")


def test_graph6_small_example():
    g = parse_graph("D?{", "graph6")
    ref = nx.from_graph6_bytes(b"D?{")
    assert sorted(g.edges()) == sorted(tuple(sorted(e)) for e in ref.edges())
    assert to_graph6(g) == "D?{"


def test_graph6_header_and_bad_length():
    assert parse_graph(">>graph6<<D?{", "graph6") == parse_graph("D?{", "graph6")
    with pytest.raises(ParseError):
        parse_graph("D?", "graph6")


def test_graph6_extended_size():
    g = path(70)
    text = to_graph6(g)
    assert text[0] == "~"
    assert parse_graph(text, "graph6") == g
    ref = nx.from_graph6_bytes(text.encode())
    assert ref.number_of_edges() == 69


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_round_trips(g):
    assert parse_graph(to_graph6(g), "graph6") == g
    assert to_graph6(g) == nx.to_graph6_bytes(to_nx(g), header=False).decode().strip()
    assert parse_graph(to_edge_list(g)) == g


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_adjacency_invariants(g):
    for v in range(g.n):
        assert list(g.adj[v]) == sorted(set(g.adj[v]))
        assert v not in g.adj[v]
        for w in g.adj[v]:
            assert v in g.adj[w]


def test_families_basic():
    assert path(4).edges() == [(0, 1), (1, 2), (2, 3)]
    sp = spider([2, 2, 2])
    assert sp.n == 7 and sp.adj[0] == (1, 3, 5)
    assert star(5).degree(0) == 4
    assert generate("spider:2,2,2") == sp
    assert generate("path:4") == path(4)
    with pytest.raises(GraphError):
        generate("path:0")
    with pytest.raises(GraphError):
        spider([])


@pytest.mark.parametrize("n", [3, 4, 10, 31])
def test_path_degrees(n):
    degs = sorted(path(n).degree(v) for v in range(n))
    assert degs.count(1) == 2 and degs.count(2) == n - 2


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=3, max_size=8))
def test_spider_has_one_branch_vertex(legs):
    g = spider(legs)
    assert sum(1 for v in range(g.n) if g.degree(v) >= 3) == 1
    assert g.n == 1 + sum(legs)


def test_parse_family():
    spec = parse_family("random_tree:400:seed=1")
    assert (spec.name, spec.n, spec.seed) == ("random_tree", 400, 1)
    assert parse_family("spider:1,2").legs == (1, 2)


@pytest.mark.parametrize("seed", range(8))
def test_random_families_deterministic_and_valid(seed):
    t = random_tree(60, seed)
    assert t == random_tree(60, seed) and is_tree(t)
    c = random_cactus(50, seed)
    assert c == random_cactus(50, seed) and c.n == 50 and is_cactus(c)
    h = random_chordal(12, seed)
    assert h.n == 12 and nx.is_chordal(to_nx(h)) and nx.is_connected(to_nx(h))
    s = random_spider(40, seed)
    assert is_tree(s) and sum(1 for v in range(40) if s.degree(v) > 2) <= 1


def test_random_cactus_blocks():
    g = random_cactus(50, 7)
    for verts, edges in biconnected_blocks(g):
        assert len(edges) == 1 or len(edges) == len(verts)
    # every edge on at most one simple cycle, via networkx's cycle basis
    basis = nx.cycle_basis(to_nx(g))
    seen = set()
    for cyc in basis:
        es = {frozenset((cyc[i], cyc[(i + 1) % len(cyc)])) for i in range(len(cyc))}
        assert not (es & seen)
        seen |= es


@settings(max_examples=40, deadline=None)
@given(graphs(12))
def test_blocks_match_networkx(g):
    ours = sorted(tuple(v) for v, e in biconnected_blocks(g) if e)
    ref = sorted(tuple(sorted(b)) for b in nx.biconnected_components(to_nx(g)))
    assert ours == ref
    assert is_cactus(g) == (nx.is_connected(to_nx(g)) and all(
        len(b) == 2 or to_nx(g).subgraph(b).number_of_edges() == len(b)
        for b in nx.biconnected_components(to_nx(g))))


def test_not_cactus():
    assert not is_cactus(complete(4))
    assert is_cactus(cycle(5))


def test_spanning_tree_examples():
    t = spanning_tree(cycle(4), 0)
    assert sorted(t.graph.edges()) == [(0, 1), (0, 3), (1, 2)]
    assert sorted(spanning_tree(complete(4), 2).graph.edges()) == [(0, 2), (1, 2), (2, 3)]
    g = random_tree(30, 4)
    assert spanning_tree(g, 17).graph.edges() == g.edges()
    with pytest.raises(GraphError, match="vertex 2"):
        spanning_tree(Graph.from_edges(3, [(0, 1)]), 0)


@settings(max_examples=40, deadline=None)
@given(graphs(15), st.integers(0, 14))
def test_spanning_tree_property(g, root):
    if not nx.is_connected(to_nx(g)):
        return
    root %= g.n
    t = spanning_tree(g, root)
    assert t.graph.m == g.n - 1
    assert all(v in g.adj[u] for u, v in t.graph.edges())


def test_center_examples():
    assert center_and_radius(path(5)) == ([2], 2)
    assert center_and_radius(path(1)) == ([0], 0)
    with pytest.raises(GraphError):
        center_and_radius(path(5), [0, 4])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(0, 10**6), st.integers(0, 10**6))
def test_tree_radius_at_most_half(n, seed, pick):
    t = random_tree(n, seed)
    # grow a random connected subset by BFS from a random vertex
    start = pick % n
    order = [start]
    for v in order:
        order.extend(w for w in t.adj[v] if w not in order)
    w = order[: 1 + pick % n]
    centers, radius = center_and_radius(t, w)
    assert radius <= len(w) // 2
    c, r = tree_center(t, w)
    assert r == radius and c == min(centers)


def test_distance_matrix_vs_networkx():
    g = random_chordal(15, 3)
    d = distance_matrix(g)
    ref = dict(nx.all_pairs_shortest_path_length(to_nx(g)))
    assert all(d[u, v] == ref[u][v] for u in range(15) for v in range(15))
    assert distance_matrix(Graph.from_edges(2, []))[0, 1] == -1


def test_components_and_dot():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert components(g) == [[0, 1], [2, 3]]
    assert "0 -- 1" in to_dot(g)


@pytest.mark.parametrize("n,count", [(1, 1), (4, 2), (6, 6), (8, 23), (9, 47), (10, 106)])
def test_nonisomorphic_tree_counts(n, count):
    trees = nonisomorphic_trees(n)
    assert len(trees) == count
    if n > 1:
        assert sum(1 for _ in nx.nonisomorphic_trees(n)) == count
    assert all(is_tree(t) and t.n == n for t in trees)

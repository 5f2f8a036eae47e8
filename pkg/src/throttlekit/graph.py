"""Graph representation, text formats, family generators and metric helpers.

Vertices are dense integers ``0..n-1``.  Input labels (edge-list tokens) are
kept in ``Graph.labels`` so emitters can write them back out.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for invalid graphs or inputs that violate an operation's precondition."""


class ParseError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    adj: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels: Sequence[str] | None = None) -> "Graph":
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            nbrs[u].append(v)
            nbrs[v].append(u)
        adj = tuple(tuple(sorted(set(a))) if len(a) > 1 else tuple(a) for a in nbrs)
        return cls(n, adj, tuple(labels) if labels is not None else None)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)


@dataclass(frozen=True, eq=False)
class RootedTree:
    graph: Graph
    root: int
    parent: tuple[int, ...]  # parent[root] == -1
    order: tuple[int, ...] = field(repr=False)  # BFS order from the root

    def children(self) -> list[list[int]]:
        ch: list[list[int]] = [[] for _ in range(self.graph.n)]
        for v in self.order[1:]:
            ch[self.parent[v]].append(v)
        return ch

    def subtree_sizes(self) -> list[int]:
        size = [1] * self.graph.n
        for v in reversed(self.order[1:]):
            size[self.parent[v]] += size[v]
        return size

    @property
    def n(self) -> int:
        return self.graph.n


# ---------------------------------------------------------------------------
# text formats


def parse_graph(text: str, format: str = "edge_list") -> Graph:
    if format == "edge_list":
        return parse_edge_list(text)
    if format == "graph6":
        return parse_graph6(text)
    raise ValueError(f"unknown format {format!r}")


def parse_edge_list(text: str) -> Graph:
    index: dict[str, int] = {}
    edges = []

    def vid(tok: str) -> int:
        if tok not in index:
            index[tok] = len(index)
        return index[tok]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) == 1:
            vid(toks[0])
            continue
        if len(toks) != 2:
            raise ParseError(f"expected 'u v', got {raw.strip()!r}", lineno)
        if toks[0] == toks[1]:
            raise ParseError(f"self-loop at {toks[0]!r}", lineno)
        edges.append((vid(toks[0]), vid(toks[1])))
    labels = [None] * len(index)
    for tok, i in index.items():
        labels[i] = tok
    return Graph.from_edges(len(index), edges, labels)


def _g6_size(data: bytes, lineno: int | None) -> tuple[int, int]:
    if not data:
        raise ParseError("empty graph6 string", lineno)
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) >= 2 and data[1] == 126:
        if len(data) < 8:
            raise ParseError("truncated graph6 size header", lineno)
        n = 0
        for b in data[2:8]:
            n = (n << 6) | (b - 63)
        return n, 8
    if len(data) < 4:
        raise ParseError("truncated graph6 size header", lineno)
    n = 0
    for b in data[1:4]:
        n = (n << 6) | (b - 63)
    return n, 4


def parse_graph6(text: str) -> Graph:
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    if len(lines) != 1:
        raise ParseError(f"expected exactly one graph6 line, found {len(lines)}", lines[1][0] if len(lines) > 1 else None)
    lineno, line = lines[0]
    if line.startswith(">>graph6<<"):
        line = line[len(">>graph6<<"):]
    data = line.encode("ascii")
    if any(b < 63 or b > 126 for b in data):
        raise ParseError("graph6 byte outside 63..126", lineno)
    n, off = _g6_size(data, lineno)
    nbits = n * (n - 1) // 2
    body = data[off:]
    if len(body) != (nbits + 5) // 6:
        raise ParseError(f"graph6 body has {len(body)} bytes, expected {(nbits + 5) // 6} for n={n}", lineno)
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if (body[k // 6] - 63) >> (5 - k % 6) & 1:
                edges.append((i, j))
            k += 1
    return Graph.from_edges(n, edges)


def to_graph6(g: Graph) -> str:
    n = g.n
    if n <= 62:
        head = [n + 63]
    elif n <= 258047:
        head = [126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)]
    else:
        head = [126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)]
    bits = []
    for j in range(1, n):
        row = set(g.adj[j])
        bits.extend(1 if i in row else 0 for i in range(j))
    bits.extend([0] * (-len(bits) % 6))
    body = [63 + int("".join(map(str, bits[i:i + 6])), 2) for i in range(0, len(bits), 6)]
    return bytes(head + body).decode("ascii")


def to_edge_list(g: Graph) -> str:
    edges = g.edges()
    lines = [f"{g.label(u)} {g.label(v)}" for u, v in edges]
    # the parser numbers vertices by first appearance; declare them up front
    # whenever the edges alone would permute ids or drop isolated vertices
    seen: dict[int, None] = {}
    for e in edges:
        seen.update(dict.fromkeys(e))
    if list(seen) != list(range(g.n)):
        lines = [g.label(v) for v in range(g.n)] + lines
    return "\n".join(lines) + "\n"


def to_dot(g: Graph, name: str = "G", groups: dict[int, Sequence[int]] | None = None) -> str:
    out = [f"graph {name} {{"]
    for v in range(g.n):
        lab = g.label(v)
        if groups is not None and v in groups:
            lab = ",".join(str(x) for x in groups[v])
        out.append(f'  {v} [label="{lab}"];')
    for u, v in g.edges():
        out.append(f"  {u} -- {v};")
    out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class FamilySpec:
    name: str
    n: int = 0
    legs: tuple[int, ...] = ()
    seed: int = 0


_FAMILY_RE = re.compile(r"^([a-z_]+)(?::(.*))?$")


def parse_family(text: str) -> FamilySpec:
    """Parse strings like ``path:8``, ``spider:2,2,2`` or ``random_tree:400:seed=1``."""
    m = _FAMILY_RE.match(text.strip())
    if not m:
        raise ValueError(f"bad family spec {text!r}")
    name, rest = m.group(1), m.group(2) or ""
    parts = [p for p in rest.split(":") if p]
    seed = 0
    plain = []
    for p in parts:
        if p.startswith("seed="):
            seed = int(p[5:])
        else:
            plain.append(p)
    if name == "spider":
        if not plain:
            raise ValueError("spider needs leg lengths")
        return FamilySpec(name, legs=tuple(int(x) for x in plain[0].split(",")), seed=seed)
    if len(plain) != 1:
        raise ValueError(f"family {name!r} needs exactly one size argument")
    return FamilySpec(name, n=int(plain[0]), seed=seed)


def path(n: int) -> Graph:
    _need(n)
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    _need(n)
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(n: int) -> Graph:
    """Star on ``n`` vertices, center 0."""
    _need(n)
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def spider(legs: Sequence[int]) -> Graph:
    """Center 0; each leg numbered consecutively outward from the center."""
    if len(legs) == 0:
        raise GraphError("spider needs at least one leg")
    if any(l < 1 for l in legs):
        raise GraphError("leg lengths must be positive")
    edges = []
    nxt = 1
    for length in legs:
        prev = 0
        for _ in range(length):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return Graph.from_edges(nxt, edges)


def random_tree(n: int, seed: int) -> Graph:
    """Uniform random labelled tree (Pruefer decoding)."""
    _need(n)
    if n <= 2:
        return path(n)
    rng = np.random.default_rng(seed)
    seq = rng.integers(0, n, size=n - 2).tolist()
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    # linear-time decoding
    edges = []
    ptr = degree.index(1)
    leaf = ptr
    for x in seq:
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1 and x < ptr:
            leaf = x
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, n - 1))
    return Graph.from_edges(n, edges)


def random_cactus(n: int, seed: int, p_cycle: float = 0.3) -> Graph:
    """Grow a random cactus: each new piece hangs off one existing vertex.

    A piece is a pendant edge or, with probability ``p_cycle``, a cycle of
    length 3..8 through the chosen vertex.  New cycles share only that vertex
    with the existing graph, so every block is an edge or a cycle.
    """
    _need(n)
    rng = np.random.default_rng(seed)
    edges = []
    m = 1
    while m < n:
        u = int(rng.integers(0, m))
        room = n - m
        if room >= 2 and rng.random() < p_cycle:
            length = int(rng.integers(3, 9))
            length = min(length, room + 1)
            ring = [u] + list(range(m, m + length - 1))
            edges.extend((ring[i], ring[(i + 1) % length]) for i in range(length))
            m += length - 1
        else:
            edges.append((u, m))
            m += 1
    return Graph.from_edges(n, edges)


def random_chordal(n: int, seed: int) -> Graph:
    """Random tree plus the fill-in of a random elimination ordering."""
    _need(n)
    rng = np.random.default_rng(seed)
    base = random_tree(n, int(rng.integers(0, 2**31)))
    order = rng.permutation(n).tolist()
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    nbrs = [set(a) for a in base.adj]
    for v in order:
        later = [w for w in nbrs[v] if pos[w] > pos[v]]
        for i, a in enumerate(later):
            for b in later[i + 1:]:
                nbrs[a].add(b)
                nbrs[b].add(a)
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in nbrs[u] if u < v])


def random_spider(n: int, seed: int) -> Graph:
    """Spider of order ``n`` with a random number of legs and random leg lengths."""
    if n < 4:
        raise GraphError("random_spider needs n >= 4")
    rng = np.random.default_rng(seed)
    max_legs = max(3, min(n - 1, int(3 * np.sqrt(n))))
    k = int(rng.integers(3, max_legs + 1))
    # random composition of n-1 into k positive parts
    cuts = np.sort(rng.choice(np.arange(1, n - 1), size=k - 1, replace=False))
    legs = np.diff(np.concatenate(([0], cuts, [n - 1]))).tolist()
    return spider(legs)


def generate(spec: FamilySpec | str) -> Graph:
    if isinstance(spec, str):
        spec = parse_family(spec)
    name = spec.name
    if name == "spider":
        return spider(spec.legs)
    if spec.n <= 0:
        raise GraphError(f"{name}: empty spec (n must be positive)")
    simple = {"path": path, "star": star, "cycle": cycle, "complete": complete}
    if name in simple:
        return simple[name](spec.n)
    seeded = {
        "random_tree": random_tree,
        "random_cactus": random_cactus,
        "random_chordal": random_chordal,
        "random_spider": random_spider,
    }
    if name in seeded:
        return seeded[name](spec.n, spec.seed)
    if name == "lower_spider":
        from .bounds import realize, spider_lower_family

        return realize(spider_lower_family(spec.n))
    raise GraphError(f"unknown family {name!r}")


def _need(n: int) -> None:
    if n <= 0:
        raise GraphError("empty spec: n must be positive")


def _canon_rooted(adj: list[list[int]], v: int, parent: int) -> str:
    return "(" + "".join(sorted(_canon_rooted(adj, w, v) for w in adj[v] if w != parent)) + ")"


def tree_canonical_form(g: Graph) -> str:
    """AHU encoding rooted at the tree's center(s); equal iff isomorphic."""
    centers, _ = center_and_radius(g)
    adj = [list(a) for a in g.adj]
    return min(_canon_rooted(adj, c, -1) for c in centers)


def nonisomorphic_trees(n: int) -> list[Graph]:
    """All trees on ``n`` vertices up to isomorphism (leaf-extension + AHU dedupe)."""
    _need(n)
    level = {tree_canonical_form(path(1)): path(1)}
    for m in range(1, n):
        nxt: dict[str, Graph] = {}
        for t in level.values():
            for v in range(m):
                h = Graph.from_edges(m + 1, t.edges() + [(v, m)])
                key = tree_canonical_form(h)
                nxt.setdefault(key, h)
        level = nxt
    return [level[k] for k in sorted(level)]


# ---------------------------------------------------------------------------
# traversal and metrics


def bfs_distances(g: Graph, sources: int | Iterable[int], within: set[int] | None = None) -> list[int]:
    """Multi-source BFS distances; -1 for unreachable (or outside ``within``)."""
    if isinstance(sources, int):
        sources = [sources]
    dist = [-1] * g.n
    q = deque()
    for s in sources:
        if dist[s] == -1 and (within is None or s in within):
            dist[s] = 0
            q.append(s)
    adj = g.adj
    while q:
        u = q.popleft()
        du = dist[u] + 1
        for w in adj[u]:
            if dist[w] == -1 and (within is None or w in within):
                dist[w] = du
                q.append(w)
    return dist


def distance_matrix(g: Graph) -> np.ndarray:
    """All-pairs hop distances (int32; -1 where unreachable)."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    rows = [u for u in range(g.n) for _ in g.adj[u]]
    cols = [w for u in range(g.n) for w in g.adj[u]]
    mat = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(g.n, g.n))
    d = shortest_path(mat, unweighted=True, directed=False)
    d[np.isinf(d)] = -1
    return d.astype(np.int32)


def is_connected(g: Graph) -> bool:
    return g.n == 0 or min(bfs_distances(g, 0)) >= 0


def require_connected(g: Graph) -> None:
    if g.n == 0:
        raise GraphError("graph has no vertices")
    dist = bfs_distances(g, 0)
    if -1 in dist:
        raise GraphError(f"graph is disconnected: vertex {dist.index(-1)} unreachable from 0")


def is_tree(g: Graph) -> bool:
    return g.n >= 1 and g.m == g.n - 1 and is_connected(g)


def spanning_tree(g: Graph, root: int = 0) -> RootedTree:
    """BFS spanning tree; neighbours are visited in increasing id order."""
    if not 0 <= root < g.n:
        raise GraphError(f"root {root} out of range")
    parent = [-2] * g.n
    parent[root] = -1
    order = [root]
    q = deque([root])
    adj = g.adj
    while q:
        u = q.popleft()
        for w in adj[u]:
            if parent[w] == -2:
                parent[w] = u
                order.append(w)
                q.append(w)
    if len(order) != g.n:
        raise GraphError(f"graph is disconnected: vertex {parent.index(-2)} unreachable from {root}")
    tree = Graph.from_edges(g.n, [(v, parent[v]) for v in order[1:]], g.labels)
    return RootedTree(tree, root, tuple(parent), tuple(order))


def root_tree(t: Graph, root: int = 0) -> RootedTree:
    if t.m != t.n - 1:
        raise GraphError("not a tree: edge count differs from n-1")
    return spanning_tree(t, root)


def center_and_radius(g: Graph, within: Iterable[int] | None = None) -> tuple[list[int], int]:
    """Centres and radius of the subgraph induced on ``within`` (default: all of ``g``)."""
    verts = sorted(set(within)) if within is not None else list(range(g.n))
    if not verts:
        raise GraphError("empty vertex set")
    ws = set(verts) if within is not None else None
    best, centers = None, []
    for v in verts:
        dist = bfs_distances(g, v, ws)
        if any(dist[u] < 0 for u in verts):
            raise GraphError("induced subgraph is disconnected")
        ecc = max(dist[u] for u in verts)
        if best is None or ecc < best:
            best, centers = ecc, [v]
        elif ecc == best:
            centers.append(v)
    return centers, best


def tree_center(g: Graph, within: Iterable[int]) -> tuple[int, int]:
    """Lowest-id centre and radius of a subtree, in O(|within|) via two sweeps."""
    ws = set(within)
    start = min(ws)
    d0 = bfs_distances(g, start, ws)
    a = max(ws, key=lambda v: (d0[v], -v))
    da = bfs_distances(g, a, ws)
    b = max(ws, key=lambda v: (da[v], -v))
    db = bfs_distances(g, b, ws)
    diam = da[b]
    radius = (diam + 1) // 2
    cands = [v for v in ws if da[v] + db[v] == diam and max(da[v], db[v]) == radius]
    return min(cands), radius


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
    """Induced subgraph relabelled to ``0..k-1``; returns it with the old ids."""
    old = sorted(set(vertices))
    new = {v: i for i, v in enumerate(old)}
    edges = [(new[u], new[w]) for u in old for w in g.adj[u] if w in new and u < w]
    return Graph.from_edges(len(old), edges), old


def components(g: Graph, vertices: Iterable[int] | None = None) -> list[list[int]]:
    ws = set(vertices) if vertices is not None else set(range(g.n))
    seen: set[int] = set()
    out = []
    for s in sorted(ws):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        q = deque([s])
        while q:
            u = q.popleft()
            for w in g.adj[u]:
                if w in ws and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    q.append(w)
        out.append(sorted(comp))
    return out


def biconnected_blocks(g: Graph) -> list[tuple[list[int], list[tuple[int, int]]]]:
    """Blocks (vertex list, edge list) via iterative Hopcroft-Tarjan."""
    n = g.n
    disc = [-1] * n
    low = [0] * n
    blocks = []
    t = 0
    for s in range(n):
        if disc[s] != -1:
            continue
        disc[s] = low[s] = t
        t += 1
        estack: list[tuple[int, int]] = []
        stack = [(s, -1, iter(g.adj[s]))]
        while stack:
            u, pu, it = stack[-1]
            advanced = False
            for w in it:
                if disc[w] == -1:
                    estack.append((u, w))
                    disc[w] = low[w] = t
                    t += 1
                    stack.append((w, u, iter(g.adj[w])))
                    advanced = True
                    break
                if w != pu and disc[w] < disc[u]:
                    estack.append((u, w))
                    low[u] = min(low[u], disc[w])
            if advanced:
                continue
            stack.pop()
            if pu != -1:
                low[pu] = min(low[pu], low[u])
                if low[u] >= disc[pu]:
                    bedges = []
                    while True:
                        e = estack.pop()
                        bedges.append(e)
                        if e == (pu, u):
                            break
                    verts = sorted({x for e in bedges for x in e})
                    blocks.append((verts, sorted(tuple(sorted(e)) for e in bedges)))
        if g.adj[s] == () and n >= 1:
            blocks.append(([s], []))
    return blocks


def is_cactus(g: Graph) -> bool:
    """Connected and every block is a single edge or a simple cycle."""
    if not is_connected(g):
        return False
    for verts, edges in biconnected_blocks(g):
        if len(edges) <= 1:
            continue
        if len(edges) != len(verts):
            return False
    return True

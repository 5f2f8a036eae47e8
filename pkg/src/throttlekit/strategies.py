"""Constructive cop strategies: tree pursuit, spider covers and cactus flattening."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .decomposition import CoverPlan, tree_partition
from .graph import (
    Graph,
    GraphError,
    bfs_distances,
    biconnected_blocks,
    components,
    distance_matrix,
    induced_subgraph,
    is_tree,
    require_connected,
    root_tree,
    tree_center,
)

ROBBER_POLICIES = ("greedy_far", "stationary", "exact_best")
_MATRIX_LIMIT = 4000


@dataclass
class PursuitTrace:
    rounds: int
    history: list[tuple[tuple[int, ...], int]]
    captured: bool
    region_of_capture: int | None

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "captured": self.captured,
            "region_of_capture": self.region_of_capture,
            "history": [{"cops": list(c), "robber": r} for c, r in self.history],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class _TreeMetric:
    """Distances and next steps on a tree.

    Small trees use the full distance matrix.  Large ones use binary lifting
    (ancestor jump tables), so every query is vectorised over a batch of cops.
    """

    def __init__(self, t: Graph):
        self.adj = t.adj
        self.mat = distance_matrix(t) if t.n <= _MATRIX_LIMIT else None
        if self.mat is not None:
            return
        rt = root_tree(t, 0)
        n = t.n
        parent = np.array([0 if p is None or p < 0 else p for p in rt.parent], dtype=np.int64)
        depth = np.zeros(n, dtype=np.int64)
        for v in rt.order[1:]:
            depth[v] = depth[parent[v]] + 1
        up = [parent]
        while (1 << len(up)) <= int(depth.max()):
            up.append(up[-1][up[-1]])
        self.parent, self.depth, self.up = parent, depth, up

    def _lift(self, v: np.ndarray, k: np.ndarray) -> np.ndarray:
        v = v.copy()
        for bit, table in enumerate(self.up):
            sel = (k >> bit) & 1 == 1
            v[sel] = table[v[sel]]
        return v

    def _lca(self, u: np.ndarray, r: int) -> np.ndarray:
        d = self.depth
        rv = np.full(u.shape, r, dtype=np.int64)
        du, dr = d[u], d[r]
        u = self._lift(u, np.maximum(du - dr, 0))
        rv = self._lift(rv, np.maximum(dr - du, 0))
        for table in reversed(self.up):
            diff = table[u] != table[rv]
            u = np.where(diff, table[u], u)
            rv = np.where(diff, table[rv], rv)
        return np.where(u == rv, u, self.parent[u])

    def dists(self, r: int, vs) -> np.ndarray:
        vs = np.asarray(vs, dtype=np.int64)
        if self.mat is not None:
            return self.mat[r, vs]
        a = self._lca(vs, r)
        return self.depth[vs] + self.depth[r] - 2 * self.depth[a]

    def steps(self, cops, r: int) -> tuple[int, ...]:
        """Every cop moves one edge along its tree path toward ``r``."""
        if self.mat is not None:
            dr = self.mat[r]
            return tuple(c if c == r else min(self.adj[c], key=lambda w: dr[w]) for c in cops)
        c = np.asarray(cops, dtype=np.int64)
        d = self.depth
        below = d[r] - d[c]
        anc = self._lift(np.full(c.shape, r, dtype=np.int64), np.maximum(below, 0))
        # a cop that is an ancestor of r steps to the child leading down to r
        down = (below > 0) & (anc == c)
        nxt = self.parent[c].copy()
        if down.any():
            nxt[down] = self._lift(np.full(int(down.sum()), r, dtype=np.int64), below[down] - 1)
        nxt[c == r] = r
        return tuple(int(v) for v in nxt)


def _check_plan(t: Graph, plan: CoverPlan) -> None:
    covered = set()
    for reg in plan.regions:
        covered.update(reg)
        if len(components(t, reg)) != 1:
            raise GraphError("plan region does not induce a connected subtree")
    if len(covered) != t.n:
        raise GraphError("plan does not cover every vertex")


class TreePursuit:
    """One cop per region starts at the region's centre; every round each cop
    steps along the tree path toward the robber, then the robber replies.

    Setup (validation, centres, distance structure) is done once, so many
    robber starts can be played on the same tree and plan.
    """

    def __init__(self, t: Graph, plan: CoverPlan):
        if not is_tree(t):
            raise GraphError("tree_pursuit needs a tree")
        _check_plan(t, plan)
        self.t = t
        self.metric = _TreeMetric(t)
        self.cops0 = tuple(tree_center(t, reg)[0] for reg in plan.regions)
        self._far = None
        self._value = None

    def _exact_value(self):
        if self._value is None:
            if self.t.n > 60:
                raise GraphError("exact_best robber is limited to small trees")
            adj, steps = self.t.adj, self.metric.steps

            @lru_cache(maxsize=None)
            def value(cops: tuple[int, ...], r: int) -> int:
                nxt = steps(cops, r)
                if r in nxt:
                    return 1
                return 1 + max(value(nxt, w) for w in (r, *adj[r]) if w not in nxt)

            self._value = value
        return self._value

    def default_start(self, robber: str = "greedy_far") -> int:
        cops0 = self.cops0
        free = [v for v in range(self.t.n) if v not in cops0] or [0]
        if robber == "exact_best":
            value = self._exact_value()
            return max(free, key=lambda v: (value(cops0, v), -v))
        if self._far is None:
            self._far = bfs_distances(self.t, cops0)
        far = self._far
        return max(free, key=lambda v: (far[v], -v))

    def run(self, robber: str = "greedy_far", start: int | None = None,
            max_rounds: int | None = None) -> PursuitTrace:
        if robber not in ROBBER_POLICIES:
            raise ValueError(f"unknown robber policy {robber!r}")
        adj, metric = self.t.adj, self.metric
        value = self._exact_value() if robber == "exact_best" else None
        if start is None:
            start = self.default_start(robber)
        if not 0 <= start < self.t.n:
            raise GraphError(f"robber start {start} is not a vertex")

        limit = max_rounds if max_rounds is not None else 4 * self.t.n + 4
        cops, r = self.cops0, start
        history = [(cops, r)]
        rounds = 0
        while r not in cops and rounds < limit:
            rounds += 1
            cops = metric.steps(cops, r)
            if r in cops:
                history.append((cops, r))
                break
            options = (r, *adj[r])
            if robber == "greedy_far":
                r = max(options, key=lambda w: (int(metric.dists(w, cops).min()), -w))
            elif robber == "exact_best":
                safe = [w for w in options if w not in cops]
                r = max(safe, key=lambda w: (value(cops, w), -w))
            history.append((cops, r))
        captured = r in cops
        region = cops.index(r) if captured else None
        return PursuitTrace(rounds, history, captured, region)


def tree_pursuit(t: Graph, plan: CoverPlan, robber: str = "greedy_far", start: int | None = None,
                 max_rounds: int | None = None) -> PursuitTrace:
    if robber not in ROBBER_POLICIES:
        raise ValueError(f"unknown robber policy {robber!r}")
    return TreePursuit(t, plan).run(robber, start, max_rounds)


def stationary_escape(g: Graph, cops) -> int:
    """Largest distance from the cop set; a robber parked there survives that many rounds."""
    cops = list(cops)
    if not cops:
        raise GraphError("need at least one cop")
    d = bfs_distances(g, cops)
    if min(d) < 0:
        raise GraphError("graph is disconnected")
    return max(d)


# ---------------------------------------------------------------------------
# spiders


def spider_legs(sp: Graph) -> tuple[int, list[list[int]]]:
    """Centre and legs (vertex lists ordered outward) of a spider or path."""
    if not is_tree(sp):
        raise GraphError("not a spider: not a tree")
    big = [v for v in range(sp.n) if sp.degree(v) > 2]
    if len(big) > 1:
        raise GraphError("not a spider: several vertices of degree > 2")
    if big:
        center = big[0]
    else:
        center = min(v for v in range(sp.n) if sp.degree(v) <= 1)
    legs = []
    for w in sp.adj[center]:
        leg, prev = [w], center
        while True:
            nxt = [u for u in sp.adj[leg[-1]] if u != prev]
            if not nxt:
                break
            prev = leg[-1]
            leg.append(nxt[0])
        legs.append(leg)
    return center, legs


def spider_cover(sp: Graph) -> CoverPlan:
    """Cut fixed-length intervals off the legs and guard the centre.

    Intervals of ``L = floor(r*sqrt(n))`` vertices are cut from the outer end
    of every leg; the shorter remainders hang off the centre.  Remainders
    longer than ``(r*sqrt(n) - 1)/2`` either stay with the centre cop (when
    there are many of them) or get a cop of their own.
    """
    center, legs = spider_legs(sp)
    n = sp.n
    r = math.sqrt(4 / 3)
    root_n = math.sqrt(n)
    L = max(1, math.floor(r * root_n))
    intervals, remainders = [], []
    for leg in legs:
        q = len(leg) // L
        rest = len(leg) - q * L
        for j in range(q):
            lo = len(leg) - (j + 1) * L
            intervals.append(leg[lo:lo + L])
        remainders.append(leg[:rest])
    half = 0.5 * (r * root_n - 1)
    long_rem = [rm for rm in remainders if len(rm) > half]
    b = len(long_rem)
    many = b > r / 2 * root_n
    regions = [sorted(iv) for iv in intervals]
    anchors = [iv[len(iv) // 2] for iv in intervals]
    if many:
        star = [center] + [v for rm in remainders for v in rm]
        regions.append(sorted(star))
        anchors.append(center)
        cop_count = len(intervals) + 1
    else:
        star = [center] + [v for rm in remainders if len(rm) <= half for v in rm]
        regions.append(sorted(star))
        anchors.append(center)
        for rm in long_rem:
            regions.append(sorted(rm))
            anchors.append(rm[len(rm) // 2])
        cop_count = len(intervals) + 1 + b
    capture = max(tree_center(sp, reg)[1] for reg in regions)
    diag = {
        "r": r,
        "b": b,
        "c": 0.5,
        "interval": L,
        "intervals": len(intervals),
        "subcase": "big_b" if many else "small_b",
        "capture_bound": capture,
        "center": center,
    }
    return CoverPlan(regions, anchors, cop_count, "spider", diag)


# ---------------------------------------------------------------------------
# cacti


@dataclass
class FlattenResult:
    tree: Graph
    fiber: list[tuple[int, ...]]  # tree vertex -> source vertices (1 or 2)
    anchor_map: list[int]  # source vertex -> tree vertex
    # odd cycles map one source edge across two tree edges: (middle node, (a, b))
    bypass: list[tuple[int, tuple[int, int]]] = field(default_factory=list)

    def to_dot(self) -> str:
        from .graph import to_dot

        return to_dot(self.tree, "T_G", {i: f for i, f in enumerate(self.fiber)})


def _cycle_order(verts: list[int], edges: list[tuple[int, int]], entry: int) -> list[int]:
    nb: dict[int, list[int]] = {v: [] for v in verts}
    for a, b in edges:
        nb[a].append(b)
        nb[b].append(a)
    seq = [entry, min(nb[entry])]
    while len(seq) < len(verts):
        a, b = nb[seq[-1]]
        seq.append(a if a != seq[-2] else b)
    return seq


def cactus_flatten(g: Graph) -> FlattenResult:
    """Flatten every cycle of a cactus into a path, giving a tree whose
    vertices stand for one or two source vertices.

    Blocks are processed breadth-first from the lowest vertex on a cycle.
    Each cycle is labelled so the vertex it shares with already-flattened
    structure is ``v_{2k}``, an endpoint of its path.
    """
    require_connected(g)
    blocks = biconnected_blocks(g)
    for verts, edges in blocks:
        if len(edges) > 1 and len(edges) != len(verts):
            raise GraphError("not a cactus: a block is neither an edge nor a cycle")
    blocks = [b for b in blocks if b[1]]
    blocks.sort(key=lambda b: (b[0][0], b[0]))
    at: dict[int, list[int]] = {}
    for i, (verts, _) in enumerate(blocks):
        for v in verts:
            at.setdefault(v, []).append(i)

    on_cycle = [v for verts, edges in blocks if len(edges) > 2 for v in verts]
    start = min(on_cycle) if on_cycle else 0
    node_of: dict[int, int] = {start: 0}
    fibers: list[list[int]] = [[start]]
    tedges: list[tuple[int, int]] = []
    bypass: list[tuple[int, tuple[int, int]]] = []

    def new_node(*src: int) -> int:
        fibers.append(sorted(src))
        for s in src:
            node_of[s] = len(fibers) - 1
        return len(fibers) - 1

    done = [False] * len(blocks)
    queue = deque((i, start) for i in at.get(start, []))
    for i, _ in queue:
        done[i] = True
    while queue:
        i, v = queue.popleft()
        verts, edges = blocks[i]
        if len(edges) == 1:
            w = verts[0] if verts[1] == v else verts[1]
            tedges.append((node_of[v], new_node(w)))
        else:
            seq = _cycle_order(verts, edges, v)
            size = len(seq)
            k = size // 2
            lab = {}  # cycle label -> source vertex
            lab[2 * k] = v
            if size % 2 == 0:
                for j in range(1, size):
                    lab[j] = seq[j]
            else:
                lab[2 * k + 1] = seq[1]
                for j in range(2, size):
                    lab[j - 1] = seq[j]
            chain = [new_node(lab[k])]
            for d in range(1, k):
                chain.append(new_node(lab[k - d], lab[k + d]))
            if size % 2 == 1:
                mid = new_node(lab[2 * k + 1])
                chain.append(mid)
                bypass.append((mid, (lab[2 * k - 1], lab[2 * k])))
            chain.append(node_of[v])
            tedges.extend(zip(chain, chain[1:]))
        for u in verts:
            for j in at[u]:
                if not done[j]:
                    done[j] = True
                    queue.append((j, u))

    # number tree vertices by their smallest source vertex
    order = sorted(range(len(fibers)), key=lambda i: fibers[i][0])
    relabel = {old: new for new, old in enumerate(order)}
    fiber = [tuple(fibers[old]) for old in order]
    tree = Graph.from_edges(len(fiber), [(relabel[a], relabel[b]) for a, b in tedges])
    anchor_map = [relabel[node_of[v]] for v in range(g.n)]
    bypass = [(relabel[m], e) for m, e in bypass]
    return FlattenResult(tree, fiber, anchor_map, bypass)


CACTUS_COPS_PER_REGION = 6


def cactus_plan(g: Graph) -> CoverPlan:
    """Guard the subtree junctions of the flattened tree and allot six cops per region.

    Regions are the preimages of the tree parts; guards sit on every source
    vertex mapped to a part's anchor.  When an anchor is the inserted middle
    vertex of an odd cycle, the cycle edge that jumps over it is blocked by an
    extra guard on its endpoint ``v_{2k}``.
    """
    fr = cactus_flatten(g)
    n, m = g.n, fr.tree.n
    x = math.sqrt(n) + 1
    if x >= m:
        tparts, tanchors = [list(range(m))], [0]
    else:
        tp = tree_partition(root_tree(fr.tree, 0), x)
        tparts, tanchors = tp.parts, tp.anchors
    tregions = [sorted(set(p) | {a}) for p, a in zip(tparts, tanchors)]
    anchor_nodes = sorted(set(tanchors))
    guards = {s for a in anchor_nodes for s in fr.fiber[a]}
    extra = []
    anchor_set = set(anchor_nodes)
    for mid, (_, far) in fr.bypass:
        if mid in anchor_set and far not in guards:
            guards.add(far)
            extra.append(far)
    regions = [sorted(s for t in reg for s in fr.fiber[t]) for reg in tregions]
    anchors = [fr.fiber[a][0] for a in tanchors]
    max_region = max(len(r) for r in regions)
    cop_count = len(guards) + CACTUS_COPS_PER_REGION * len(regions)
    diag = {
        "x": x,
        "s": len(tparts) - 1,
        "tree_order": m,
        "guards": sorted(guards),
        "bypass_guards": sorted(extra),
        "cops_per_region": CACTUS_COPS_PER_REGION,
        # three cops catch a robber on a connected planar graph H within 2|H| rounds
        "capture_bound": 2 * max_region,
        "tree_regions": tregions,
    }
    return CoverPlan(regions, anchors, cop_count, "cactus", diag)


def guard_separation_ok(g: Graph, plan: CoverPlan) -> bool:
    """Every component of g minus the guards lies inside one region."""
    guards = set(plan.diagnostics["guards"])
    rest = [v for v in range(g.n) if v not in guards]
    region_sets = [set(r) for r in plan.regions]
    for comp in components(g, rest):
        if not any(set(comp) <= rs for rs in region_sets):
            return False
    return True


def region_components(g: Graph, plan: CoverPlan) -> list[list[list[int]]]:
    """Connected components of each region's induced subgraph."""
    return [components(g, reg) for reg in plan.regions]


def confined_capture_check(g: Graph, plan: CoverPlan, budget: int | None = None) -> list[dict]:
    """Exact check that three cops capture inside every region component within 2|H| rounds.

    The robber cannot leave its component of g minus the guards, and that
    component sits inside one region component ``H``; cops playing on ``H``
    therefore catch it no later than on ``H`` itself.
    """
    from .solvers import capture_time

    report = []
    for i, comps in enumerate(region_components(g, plan)):
        for comp in comps:
            sub, _ = induced_subgraph(g, comp)
            out = capture_time(sub, min(3, sub.n), budget)
            report.append({
                "region": i,
                "order": sub.n,
                "rounds": out.rounds,
                "ok": out.captured and out.rounds <= 2 * sub.n,
            })
    return report


def region_radii(t: Graph, plan: CoverPlan) -> list[int]:
    return [tree_center(t, reg)[1] for reg in plan.regions]


def pursuit_bound(t: Graph, plan: CoverPlan) -> int:
    """Rounds within which centre-started chasing cops must catch any robber."""
    return max(region_radii(t, plan))


def random_robber_starts(n: int, count: int, seed: int) -> list[int]:
    rng = np.random.default_rng(seed)
    return rng.integers(0, n, size=count).tolist()

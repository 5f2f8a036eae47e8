"""Limb extraction, balanced bipartition, tree partition and the cover planner."""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field

from .graph import Graph, GraphError, RootedTree, induced_subgraph, require_connected, root_tree, spanning_tree


@dataclass(frozen=True)
class LimbSplit:
    s: frozenset[int]
    v: int


@dataclass(frozen=True)
class Bipartition:
    s0: frozenset[int]
    s1: frozenset[int]


@dataclass(frozen=True)
class TreePartition:
    parts: list[list[int]]
    anchors: list[int]
    x: float

    @property
    def s(self) -> int:
        return len(self.parts) - 1


@dataclass
class CoverPlan:
    regions: list[list[int]]
    anchors: list[int]
    cop_count: int
    case_tag: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def max_region(self) -> int:
        return max(len(r) for r in self.regions)

    def to_dict(self) -> dict:
        return {
            "regions": [sorted(r) for r in self.regions],
            "anchors": list(self.anchors),
            "k": self.cop_count,
            "max_region": self.max_region,
            "case_tag": self.case_tag,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_x(x: float, n: int) -> None:
    if x < 1.5:
        raise GraphError(f"threshold x={x} below 1.5")
    if x >= n:
        raise GraphError(f"threshold x={x} must be below n={n}")


def limb_split(t: RootedTree, x: float) -> LimbSplit:
    """Find a limb ``S`` at ``v`` with ``x < |S| <= 2x-1`` whose removal (keeping v) leaves T connected.

    Mirrors the inductive construction directly: walk down maximum branches
    while they are too big, then take one branch or accumulate several.
    Ties between equal branches go to the lower child id.
    """
    n = t.n
    _check_x(x, n)
    children = t.children()
    size = t.subtree_sizes()
    hi = 2 * x - 1

    def collect(roots: list[int]) -> list[int]:
        out, stack = [], list(roots)
        while stack:
            w = stack.pop()
            out.append(w)
            stack.extend(children[w])
        return out

    u, m = t.root, n
    while True:
        if x < m <= hi:
            return LimbSplit(frozenset(collect([u])), u)
        kids = sorted(children[u], key=lambda c: (-size[c], c))
        branch = size[kids[0]] + 1
        if branch > hi:
            u, m = kids[0], size[kids[0]]
            continue
        if branch > x:
            return LimbSplit(frozenset([u] + collect([kids[0]])), u)
        acc, chosen = 1, []
        for c in kids:
            chosen.append(c)
            acc += size[c]
            if acc > x:
                break
        return LimbSplit(frozenset([u] + collect(chosen)), u)


def balanced_bipartition(t: RootedTree) -> Bipartition:
    """Two connected vertex sets covering T, sharing at most one vertex.

    ``s0`` is a limb with ``ceil(n/3) <= |s0| <= floor(2n/3) + 1``.
    """
    n = t.n
    if n < 2:
        raise GraphError("bipartition needs n >= 2")
    if n == 2:
        leaf = t.order[1]
        return Bipartition(frozenset([leaf]), frozenset(range(2)))
    x = 1.5 if n < 5 else n / 3
    ls = limb_split(t, x)
    rest = frozenset(set(range(n)) - ls.s) | {ls.v}
    return Bipartition(ls.s, rest)


class _Partitioner:
    """Repeated limb extraction on a shrinking tree.

    Subtree sizes are updated along the root path after each removal and
    children are kept in lazy max-heaps, so each split costs about the tree
    height instead of a full recount.  Produces the same limbs as calling
    :func:`limb_split` on each residual tree.
    """

    def __init__(self, t: RootedTree):
        self.t = t
        self.children = t.children()
        self.size = t.subtree_sizes()
        self.parent = t.parent
        self.alive = [True] * t.n
        self.heaps: dict[int, list[tuple[int, int]]] = {}

    def _heap(self, u: int) -> list[tuple[int, int]]:
        h = self.heaps.get(u)
        if h is None:
            h = [(-self.size[c], c) for c in self.children[u] if self.alive[c]]
            heapq.heapify(h)
            self.heaps[u] = h
        return h

    def _top(self, u: int) -> int | None:
        h = self._heap(u)
        while h:
            negs, c = h[0]
            if self.alive[c] and self.size[c] == -negs:
                return c
            heapq.heappop(h)
        return None

    def _collect(self, roots: list[int]) -> list[int]:
        out, stack = [], list(roots)
        alive, children = self.alive, self.children
        while stack:
            w = stack.pop()
            out.append(w)
            alive[w] = False
            stack.extend(c for c in children[w] if alive[c])
        return out

    def split(self, x: float) -> tuple[list[int], int]:
        """Remove one limb minus its anchor; return (removed vertices, anchor)."""
        size = self.size
        hi = 2 * x - 1
        u = self.t.root
        m = size[u]
        while True:
            if x < m <= hi:
                chosen = [c for c in self.children[u] if self.alive[c]]
                self.heaps[u] = []
                break
            c = self._top(u)
            branch = size[c] + 1
            if branch > hi:
                u, m = c, size[c]
                continue
            h = self._heap(u)
            if branch > x:
                heapq.heappop(h)
                chosen = [c]
                break
            acc, chosen = 1, []
            while acc <= x:
                c = self._top(u)
                heapq.heappop(h)
                chosen.append(c)
                acc += size[c]
            break
        removed = self._collect(chosen)
        k = len(removed)
        size[u] -= k
        w = u
        while self.parent[w] != -1:
            p = self.parent[w]
            size[p] -= k
            if p in self.heaps:
                heapq.heappush(self.heaps[p], (-size[w], w))
            w = p
        return removed, u

    def residual(self) -> list[int]:
        return [v for v in range(self.t.n) if self.alive[v]]


def tree_partition(t: RootedTree, x: float) -> TreePartition:
    """Disjoint parts Y_0..Y_s covering V with anchors v_i.

    ``x-1 < |Y_i| <= 2x-1`` for i < s, ``|Y_s| <= x`` and each
    ``Y_i + {v_i}`` induces a connected subtree.  The last anchor is the root.
    """
    n = t.n
    if x >= n:
        return TreePartition([list(range(n))], [t.root], x)
    _check_x(x, n)
    eng = _Partitioner(t)
    parts, anchors = [], []
    while eng.size[t.root] > x:
        removed, v = eng.split(x)
        parts.append(sorted(removed))
        anchors.append(v)
    parts.append(eng.residual())
    anchors.append(t.root)
    return TreePartition(parts, anchors, x)


def cover_radius(c: float) -> float:
    """Scale factor r with x = r*sqrt(n) balancing cops against capture time."""
    return math.sqrt(4 / (7 * c))


def certified_constant(c: float) -> float:
    r = cover_radius(c)
    return 2 + 1 / r**2 + c


def plan_cover(g: Graph, c: float, root: int = 0) -> CoverPlan:
    """Connected cover of ``g`` with about sqrt(n) regions of order about sqrt(n).

    Builds a BFS spanning tree, partitions it at ``x = r*sqrt(n)`` and then,
    depending on how many parts are large, either keeps every part or splits
    each large part in two.
    """
    if c <= 0:
        raise GraphError("c must be positive")
    n = g.n
    r = cover_radius(c)
    x = r * math.sqrt(n)
    if n < 9 or not 1.5 <= x < n:
        # too small for the partition threshold to make sense: one region
        require_connected(g)
        return CoverPlan([list(range(n))], [root], 1, "small_b",
                         {"r": r, "b": 0, "s": 0, "c": c, "x": x, "degenerate": True})
    t = spanning_tree(g, root)
    tp = tree_partition(t, x)
    s = tp.s
    regions = [sorted(set(p) | {a}) for p, a in zip(tp.parts, tp.anchors)]
    cut = 1.5 * (x - 1)
    large = [i for i in range(s) if len(tp.parts[i]) > cut]
    b = len(large)
    diag = {"r": r, "b": b, "s": s, "c": c, "x": x, "degenerate": False}
    if b > r * c / 2 * math.sqrt(n):
        return CoverPlan(regions, list(tp.anchors), 1 + s, "big_b", diag)

    new_regions, new_anchors = [], []
    large_set = set(large)
    for i, (reg, a) in enumerate(zip(regions, tp.anchors)):
        if i not in large_set:
            new_regions.append(reg)
            new_anchors.append(a)
            continue
        sub, old = induced_subgraph(t.graph, reg)
        bp = balanced_bipartition(root_tree(sub, old.index(a)))
        for half in (bp.s0, bp.s1):
            part = sorted(old[j] for j in half)
            shared = bp.s0 & bp.s1
            new_regions.append(part)
            new_anchors.append(old[min(shared)] if shared else part[0])
    return CoverPlan(new_regions, new_anchors, 1 + s + b, "small_b", diag)

"""Exact solvers: capture time, robber throttling, PSD forcing and k-radius."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, islice, product

import numpy as np

from .graph import Graph, GraphError, components, distance_matrix, require_connected

DEFAULT_BUDGET = 50_000_000
_INF = 1 << 30
_CHUNK = 4_000_000  # cells per vectorised block


class BudgetExceeded(RuntimeError):
    pass


def default_budget() -> int:
    env = os.environ.get("THROTTLEKIT_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class GameOutcome:
    rounds: int | None  # None means the robber evades forever
    placement: tuple[int, ...] | None = None

    @property
    def captured(self) -> bool:
        return self.rounds is not None

    @property
    def evasion(self) -> bool:
        return self.rounds is None

    def to_dict(self) -> dict:
        if self.rounds is None:
            return {"result": "evasion"}
        return {"result": "captured", "rounds": self.rounds}


@dataclass
class ThrottleResult:
    value: int
    best_k: int
    per_k: dict[int, int | None]
    objective: str
    lower_bounds: dict[int, int] = field(default_factory=dict)
    cutoff: str = ""

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "value": self.value,
            "best_k": self.best_k,
            "per_k": {str(k): v for k, v in sorted(self.per_k.items())},
            "lower_bounds": {str(k): v for k, v in sorted(self.lower_bounds.items())},
            "cutoff": self.cutoff,
        }


# ---------------------------------------------------------------------------
# cops and robber


def _closed_nbr_table(g: Graph) -> np.ndarray:
    width = 1 + max((len(a) for a in g.adj), default=0)
    tab = np.empty((g.n, width), dtype=np.int64)
    for v in range(g.n):
        row = [v, *g.adj[v]]
        tab[v] = row + [v] * (width - len(row))
    return tab


def _binom_table(top: int, k: int) -> np.ndarray:
    tab = np.zeros((top + 1, k + 2), dtype=np.int64)
    for d in range(top + 1):
        for j in range(k + 2):
            tab[d, j] = math.comb(d, j)
    return tab


def _rank(sorted_cfgs: np.ndarray, binom: np.ndarray) -> np.ndarray:
    """Colex rank of multisets (rows sorted ascending) via c_i + i shifting."""
    k = sorted_cfgs.shape[-1]
    shifted = sorted_cfgs + np.arange(k)
    return binom[shifted, np.arange(1, k + 1)].sum(axis=-1)


class CopGame:
    """Backward induction for ``k`` cops on ``g``.

    ``value[i, r]`` is the optimal number of remaining rounds when it is the
    cops' turn, the cops occupy multiset ``configs[i]`` and the robber is on
    ``r`` (``_INF`` if the robber can evade forever).
    """

    def __init__(self, g: Graph, k: int, budget: int | None = None):
        require_connected(g)
        if not 1 <= k:
            raise GraphError("k must be positive")
        budget = default_budget() if budget is None else budget
        n = g.n
        n_cfg = math.comb(n + k - 1, k)
        if n_cfg * n > budget:
            raise BudgetExceeded(f"{n_cfg * n} states exceed budget {budget}")
        nbr = _closed_nbr_table(g)
        width = nbr.shape[1]
        moves = width**k
        if n_cfg * moves > budget:
            raise BudgetExceeded(f"{n_cfg * moves} cop transitions exceed budget {budget}")
        self.g, self.k, self.n = g, k, n
        binom = _binom_table(n + k, k)
        cfgs = np.array(list(combinations_with_replacement(range(n), k)), dtype=np.int64).reshape(-1, k)
        configs = np.empty_like(cfgs)
        configs[_rank(cfgs, binom)] = cfgs
        self.configs = configs
        occ = np.zeros((n_cfg, n), dtype=bool)
        occ[np.arange(n_cfg)[:, None], configs] = True
        self.occupied = occ

        grid = np.array(list(product(range(width), repeat=k)), dtype=np.int64).reshape(-1, k)
        succ = np.empty((n_cfg, moves), dtype=np.int64)
        step = max(1, _CHUNK // (moves * k))
        for lo in range(0, n_cfg, step):
            opts = nbr[configs[lo:lo + step]]  # (B, k, width)
            nxt = opts[:, np.arange(k), grid]  # (B, moves, k)
            nxt.sort(axis=-1)
            succ[lo:lo + step] = _rank(nxt, binom)
        self.succ = succ
        self.nbr = nbr
        self.value = self._solve()

    def _solve(self) -> np.ndarray:
        occ, succ, nbr = self.occupied, self.succ, self.nbr
        n_cfg, n = occ.shape
        value = np.where(occ, 0, _INF).astype(np.int64)
        step = max(1, _CHUNK // (succ.shape[1] * n))
        while True:
            # robber to move after the cops reached configuration i
            reply = value[:, nbr].max(axis=2)
            reply[occ] = 0
            new = np.empty_like(value)
            for lo in range(0, n_cfg, step):
                new[lo:lo + step] = reply[succ[lo:lo + step]].min(axis=1)
            new = np.minimum(new + 1, _INF)
            new[occ] = 0
            if np.array_equal(new, value):
                return value
            value = new

    def outcome(self) -> GameOutcome:
        """Cops place first, the robber answers, then rounds start with the cops."""
        start = np.where(self.occupied, -1, self.value).max(axis=1)
        start[start < 0] = 0
        i = int(np.argmin(start))
        best = int(start[i])
        placement = tuple(int(c) for c in self.configs[i])
        return GameOutcome(None if best >= _INF else best, placement)


def capture_time(g: Graph, k: int, budget: int | None = None) -> GameOutcome:
    """Exact capt_k(g) under full-information optimal play."""
    if k >= g.n:
        require_connected(g)
        return GameOutcome(0, tuple(range(g.n)) + (0,) * (k - g.n))
    return CopGame(g, k, budget).outcome()


def throttle_robber(g: Graph, budget: int | None = None, k_max: int | None = None) -> ThrottleResult:
    """th_c(g) = min_k (k + capt_k(g)).

    For k < n the robber can start off the cops, so capt_k >= 1; it also
    cannot be caught faster than its distance to the nearest cop, so
    capt_k >= rad_k.  Values of k whose lower bound cannot beat the current
    optimum are skipped and their bound recorded instead.
    """
    require_connected(g)
    budget = default_budget() if budget is None else budget
    n = g.n
    best, best_k = n, n
    per_k: dict[int, int | None] = {n: 0}
    lower: dict[int, int] = {}
    k = 1
    while k < n and k + 1 <= best and (k_max is None or k <= k_max):
        lb = 1
        if math.comb(n, k) * n <= budget:
            lb = max(1, k_radius(g, k, budget))
        if k + lb > best or (k + lb == best and best_k < k):
            lower[k] = lb
            k += 1
            continue
        out = capture_time(g, k, budget)
        per_k[k] = out.rounds
        if out.captured and (k + out.rounds < best or (k + out.rounds == best and k < best_k)):
            best, best_k = k + out.rounds, k
        k += 1
    cutoff = f"k >= {best} cannot improve: capt_k >= 1 for k < n and capt_k >= rad_k"
    return ThrottleResult(best, best_k, per_k, "robber", lower, cutoff)


# ---------------------------------------------------------------------------
# PSD zero forcing


@dataclass(frozen=True)
class ForcingState:
    blue: frozenset[int]
    round: int


def psd_history(g: Graph, initial) -> list[ForcingState]:
    """Synchronous PSD forcing from ``initial``; one state per round until stall or full."""
    blue = set(initial)
    if not blue:
        raise GraphError("initial set must be non-empty")
    states = [ForcingState(frozenset(blue), 0)]
    while len(blue) < g.n:
        white = [v for v in range(g.n) if v not in blue]
        comp_of = {}
        for i, comp in enumerate(components(g, white)):
            for w in comp:
                comp_of[w] = i
        forced = set()
        for v in blue:
            seen: dict[int, list[int]] = {}
            for w in g.adj[v]:
                if w in comp_of:
                    seen.setdefault(comp_of[w], []).append(w)
            forced.update(ws[0] for ws in seen.values() if len(ws) == 1)
        if not forced:
            break
        blue |= forced
        states.append(ForcingState(frozenset(blue), states[-1].round + 1))
    return states


def psd_prop_time(g: Graph, initial) -> GameOutcome:
    hist = psd_history(g, initial)
    if len(hist[-1].blue) < g.n:
        return GameOutcome(None)
    return GameOutcome(hist[-1].round)


def _psd_time_mask(adj_mask: list[int], full: int, blue: int, limit: int) -> int:
    """Bitmask PSD propagation time; returns limit+1 when slower than ``limit`` or stalled."""
    n = len(adj_mask)
    rounds = 0
    while blue != full:
        if rounds >= limit:
            return limit + 1
        white = full & ~blue
        # label white components
        comp = [0] * n
        rest, label = white, 0
        while rest:
            label += 1
            seed = rest & -rest
            cm, frontier = seed, seed
            while frontier:
                nxt = 0
                f = frontier
                while f:
                    b = f & -f
                    nxt |= adj_mask[b.bit_length() - 1]
                    f ^= b
                nxt &= white & ~cm
                cm |= nxt
                frontier = nxt
            rest &= ~cm
            f = cm
            while f:
                b = f & -f
                comp[b.bit_length() - 1] = label
                f ^= b
        forced = 0
        f = blue
        while f:
            b = f & -f
            v = b.bit_length() - 1
            f ^= b
            wn = adj_mask[v] & white
            counts: dict[int, int] = {}
            while wn:
                bb = wn & -wn
                wn ^= bb
                c = comp[bb.bit_length() - 1]
                counts[c] = bb if c not in counts else 0
            for m in counts.values():
                forced |= m
        if not forced:
            return limit + 1
        blue |= forced
        rounds += 1
    return rounds


def psd_propagation_number(g: Graph, k: int, budget: int | None = None, limit: int | None = None) -> int | None:
    """pt_+(g, k): fastest full colouring over all size-k initial sets (None if none finishes)."""
    budget = default_budget() if budget is None else budget
    n = g.n
    if math.comb(n, k) * n > budget:
        raise BudgetExceeded(f"{math.comb(n, k)} initial sets exceed budget {budget}")
    adj_mask = [sum(1 << w for w in g.adj[v]) for v in range(n)]
    full = (1 << n) - 1
    best = n if limit is None else limit
    found = None
    for subset in combinations(range(n), k):
        blue = 0
        for v in subset:
            blue |= 1 << v
        t = _psd_time_mask(adj_mask, full, blue, best)
        if t <= best:
            best, found = t, t
            if t <= (0 if k >= n else 1):
                break
    return found


def throttle_psd(g: Graph, budget: int | None = None) -> ThrottleResult:
    """th_+(g) = min_k (k + pt_+(g, k)) by exhaustive initial-set search."""
    require_connected(g)
    n = g.n
    best, best_k = n, n
    per_k: dict[int, int | None] = {n: 0}
    lower: dict[int, int] = {}
    k = 1
    while k < n and k + 1 <= best:
        # only sets finishing within best - k rounds can improve (or tie at a smaller k)
        limit = best - k
        pt = psd_propagation_number(g, k, budget, limit=limit)
        if pt is None:
            lower[k] = limit + 1
        else:
            per_k[k] = pt
            if k + pt < best or (k + pt == best and k < best_k):
                best, best_k = k + pt, k
        k += 1
    cutoff = f"k >= {best} cannot improve: pt_+ >= 1 for k < n"
    return ThrottleResult(best, best_k, per_k, "psd", lower, cutoff)


# ---------------------------------------------------------------------------
# k-radius


def k_radius(g: Graph, k: int, budget: int | None = None, dist: np.ndarray | None = None) -> int:
    """min over k-sets D of max_v dist(v, D), by exhaustive search."""
    require_connected(g)
    n = g.n
    if k < 1:
        raise GraphError("k must be positive")
    if k >= n:
        return 0
    budget = default_budget() if budget is None else budget
    if math.comb(n, k) * n > budget:
        raise BudgetExceeded(f"{math.comb(n, k)} centre sets exceed budget {budget}")
    d = distance_matrix(g) if dist is None else dist
    best = n
    it = combinations(range(n), k)
    step = max(1, _CHUNK // (n * k))
    while True:
        block = np.array(list(islice(it, step)), dtype=np.int64)
        if block.size == 0:
            return best
        ecc = d[block].min(axis=1).max(axis=1)
        best = min(best, int(ecc.min()))


def throttle_radius(g: Graph, budget: int | None = None) -> ThrottleResult:
    require_connected(g)
    n = g.n
    d = distance_matrix(g)
    best, best_k = n, n
    per_k: dict[int, int | None] = {n: 0}
    k = 1
    while k < n and k + 1 <= best:
        rad = k_radius(g, k, budget, d)
        per_k[k] = rad
        if k + rad < best or (k + rad == best and k < best_k):
            best, best_k = k + rad, k
        k += 1
    return ThrottleResult(best, best_k, per_k, "radius", {}, f"k >= {best} cannot improve: rad_k >= 1 for k < n")

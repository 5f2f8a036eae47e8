"""Gambler adversary: a robber that lands on an i.i.d. random vertex every round.

Cops move on fixed periodic schedules and never see the gambler ("darkness"),
so a policy is just a function from round index to cop positions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .decomposition import CoverPlan
from .graph import Graph, GraphError, induced_subgraph, spanning_tree

VARIANTS = ("known", "unknown", "one_observed")
BLOCK = 1024
# the counter-based generator behind every trial stream; bump if it ever changes
RNG_NAME = "numpy.Philox-4x64-10"


@dataclass
class GamblerModel:
    p: np.ndarray
    variant: str = "unknown"

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("p must be a non-empty vector")
        if (p < 0).any() or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("p is not a probability distribution")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown gambler variant {self.variant!r}")
        self.p = p

    @property
    def n(self) -> int:
        return self.p.size

    @classmethod
    def uniform(cls, n: int, variant: str = "unknown") -> GamblerModel:
        return cls(np.full(n, 1.0 / n), variant)

    @classmethod
    def degree(cls, g: Graph, variant: str = "unknown") -> GamblerModel:
        d = np.array([max(g.degree(v), 0) for v in range(g.n)], dtype=float)
        if d.sum() == 0:
            return cls.uniform(g.n, variant)
        return cls(d / d.sum(), variant)

    @classmethod
    def from_json(cls, text: str, variant: str = "unknown") -> GamblerModel:
        data = json.loads(text)
        p = np.asarray(data["p"], dtype=float)
        # tolerate rounding in hand-written files, but not real mistakes
        if abs(p.sum() - 1.0) < 1e-9:
            p = p / p.sum()
        return cls(p, data.get("variant", variant))


@dataclass
class EctEstimate:
    mean_rounds: float
    trials: int
    std_error: float
    policy_id: str
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "mean_rounds": self.mean_rounds,
            "trials": self.trials,
            "std_error": self.std_error,
            "policy_id": self.policy_id,
            "seed": self.seed,
            "rng": RNG_NAME,
        }


class CopPolicy:
    """Periodic cop schedule; ``positions(t)`` gives the cop vertices in round t >= 1."""

    policy_id = "policy"

    def __init__(self, schedules: list[list[int]]):
        if not schedules or any(not s for s in schedules):
            raise GraphError("policy needs at least one cop with a non-empty schedule")
        self.schedules = [list(s) for s in schedules]
        # rounds after which every cop is back at its start; can be huge for many cops
        self.period = math.lcm(*(len(s) for s in self.schedules))

    def positions(self, t: int) -> list[int]:
        return [s[(t - 1) % len(s)] for s in self.schedules]


class Camping(CopPolicy):
    policy_id = "camping"

    def __init__(self, vertices):
        super().__init__([[v] for v in vertices])


class Sweep(CopPolicy):
    """One cop walking a closed walk over and over (for a path: end to end and back)."""

    policy_id = "sweep"

    def __init__(self, walk: list[int]):
        super().__init__([walk])

    @classmethod
    def path(cls, n: int) -> Sweep:
        if n == 1:
            return cls([0])
        return cls(list(range(n)) + list(range(n - 2, 0, -1)))


def _tree_tour(g: Graph, root: int) -> list[int]:
    """Closed walk around a spanning tree (each tree edge twice), without the return to root."""
    t = spanning_tree(g, root)
    kids = t.children()
    tour, stack = [], [(root, 0)]
    while stack:
        v, i = stack.pop()
        if i == 0:
            tour.append(v)
        if i < len(kids[v]):
            stack.append((v, i + 1))
            stack.append((kids[v][i], 0))
        elif stack:
            tour.append(stack[-1][0])
    return tour[:-1] if len(tour) > 1 else tour


class RegionSweep(CopPolicy):
    """One cop per region, each touring a spanning tree of its region from the anchor."""

    policy_id = "region_sweep"

    def __init__(self, g: Graph, plan: CoverPlan):
        covered = set()
        schedules = []
        for reg, a in zip(plan.regions, plan.anchors):
            covered.update(reg)
            sub, old = induced_subgraph(g, reg)
            root = old.index(a) if a in old else 0
            schedules.append([old[v] for v in _tree_tour(sub, root)])
        if len(covered) != g.n:
            raise GraphError("region sweep needs a plan covering every vertex")
        super().__init__(schedules)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), block]))


def simulate_gambler(g: Graph, model: GamblerModel, policy: CopPolicy, trials: int, seed: int,
                     max_rounds: int = 10**7) -> EctEstimate:
    """Monte Carlo estimate of the expected capture time.

    Trials run in blocks of 1024; block ``b`` draws from a Philox stream keyed
    by ``(seed, b)``, so results do not depend on how blocks are scheduled.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if model.n != g.n:
        raise ValueError("distribution length does not match the graph order")
    n = g.n
    for sched in policy.schedules:
        if any(not 0 <= v < n for v in sched):
            raise GraphError("policy visits a vertex outside the graph")
    visited = sorted({v for sched in policy.schedules for v in sched})
    if model.p[visited].sum() == 0:
        raise GraphError("cops never stand where the gambler can appear")
    period = policy.period if policy.period * n <= 2**22 else None
    if period is not None:
        masks = np.zeros((period, n), dtype=bool)
        for t in range(1, period + 1):
            masks[t - 1, policy.positions(t)] = True

    def mask(t: int) -> np.ndarray:
        if period is not None:
            return masks[(t - 1) % period]
        m = np.zeros(n, dtype=bool)
        m[policy.positions(t)] = True
        return m

    cdf = np.cumsum(model.p)
    cdf[-1] = 1.0

    out = np.empty(trials, dtype=np.int64)
    for b, lo in enumerate(range(0, trials, BLOCK)):
        size = min(BLOCK, trials - lo)
        rng = _block_rng(seed, b)
        times = np.zeros(size, dtype=np.int64)
        alive = np.arange(size)
        t = 0
        while alive.size and t < max_rounds:
            t += 1
            x = np.searchsorted(cdf, rng.random(alive.size), side="right")
            hit = mask(t)[np.minimum(x, n - 1)]
            times[alive[hit]] = t
            alive = alive[~hit]
        if alive.size:
            raise RuntimeError(f"{alive.size} trials still running after {max_rounds} rounds")
        out[lo:lo + size] = times
    mean = float(out.mean())
    se = float(out.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return EctEstimate(mean, trials, se, policy.policy_id, seed)


def expected_capture_exact(model: GamblerModel, policy: CopPolicy) -> float:
    """Expected capture time by solving the absorbing chain over schedule phases.

    With E_j the expected remaining rounds at phase j and q_j the chance the
    gambler lands on a cop there: E_j = 1 + (1 - q_j) E_{j+1 mod period}.
    """
    L = policy.period
    if L > 10**5:
        raise ValueError(f"schedule period {L} too long for the exact chain")
    q = np.empty(L)
    for j in range(L):
        q[j] = model.p[sorted(set(policy.positions(j + 1)))].sum()
    a = np.eye(L)
    for j in range(L):
        a[j, (j + 1) % L] -= 1 - q[j]
    return float(np.linalg.solve(a, np.ones(L))[0])


def unknown_gambler_constant() -> float:
    return 3 * (1 / (1 - math.exp(-2)) - 0.5)


GAMBLER_CONSTANTS = {"unknown": unknown_gambler_constant(), "one_observed": 1.5}


def gambler_bound(n: int, variant: str) -> float:
    """Throttling upper bound sqrt(7c)*sqrt(n) for the gambler variants.

    Known-distribution gamblers are no harder than one-observed ones.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown gambler variant {variant!r}")
    if n <= 0:
        return 0.0
    c = GAMBLER_CONSTANTS["one_observed" if variant == "known" else variant]
    return math.sqrt(7 * c) * math.sqrt(n)

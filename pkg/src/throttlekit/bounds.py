"""Closed-form throttling bounds, the lower-bound spider family and plan certification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import isqrt

from .decomposition import CoverPlan, certified_constant
from .gambler import GAMBLER_CONSTANTS
from .graph import Graph, GraphError, spider

EPS = 1e-9
FAMILIES = ("tree", "chordal", "spider", "cactus", "cycles_k", "gambler_u", "gambler_1")

LOWER_C = 1.08766
LOWER_RATIO = 1.4502

# Spider slack follows the tree pattern 2 + 1/r^2 + (one round of rounding)
# with r^2 = 4/3.  Sweeps over random trees (n = 9..2500) and random spiders
# (n = 4..10^4) never exceeded the envelope by more than 1.0 and 0.52, so the
# N0 values below are the smallest orders tested, not proven thresholds.
SPIDER_C = 2 + 3 / 4 + 1
TREE_N0 = 1
SPIDER_N0 = 1


def path_throttle_formula(n: int) -> int:
    """ceil(sqrt(2n) - 1/2) via the smallest t with (2t+1)^2 >= 8n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = isqrt(8 * n)
    if s * s < 8 * n:
        s += 1
    # s = ceil(sqrt(8n)); smallest t with 2t + 1 >= s
    return s // 2


def _coefficients(k_cycles: int | None) -> dict:
    tree = math.sqrt(14) / 2
    tree_c = certified_constant(0.5)
    return {
        "tree": (tree, tree_c, TREE_N0),
        "chordal": (tree, tree_c, TREE_N0),
        "spider": (math.sqrt(3), SPIDER_C, SPIDER_N0),
        "cactus": (16.0, 16.0, 1),
        "cycles_k": (tree, tree_c + (k_cycles or 0), TREE_N0),
        "gambler_u": (math.sqrt(7 * GAMBLER_CONSTANTS["unknown"]),
                      certified_constant(GAMBLER_CONSTANTS["unknown"]), TREE_N0),
        "gambler_1": (math.sqrt(42) / 2, certified_constant(1.5), TREE_N0),
    }


@dataclass
class BoundReport:
    n: int
    family: str
    coefficient: float
    upper: float
    constant_C: float
    threshold_N0: int
    witness: dict | None = None
    witness_value: float | None = None
    verdict: str | None = None
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "family": self.family,
            "coefficient": self.coefficient,
            "upper": self.upper,
            "constant_C": self.constant_C,
            "threshold_N0": self.threshold_N0,
            "witness": self.witness,
            "witness_value": self.witness_value,
            "verdict": self.verdict,
            "inputs": self.inputs,
        }

    def csv_row(self) -> list:
        return [self.n, self.family, f"{self.coefficient:.6f}", f"{self.constant_C:.6f}",
                self.threshold_N0, self.verdict or ""]


CSV_COLUMNS = ["n", "family", "coefficient", "C", "N0", "verdict"]


def upper_bound(n: int, family: str, k_cycles: int | None = None) -> BoundReport:
    if n < 1:
        raise ValueError("n must be >= 1")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if (family == "cycles_k") != (k_cycles is not None):
        raise ValueError("k_cycles is required exactly for the cycles_k family")
    coef, const, n0 = _coefficients(k_cycles)[family]
    return BoundReport(n, family, coef, coef * math.sqrt(n) + const, const, n0)


def plan_cost(plan: CoverPlan, c: float) -> int:
    """Cop count plus the rounds the plan needs to guarantee capture."""
    diag = plan.diagnostics
    if plan.case_tag in ("spider", "cactus"):
        return plan.cop_count + int(diag["capture_bound"])
    return plan.cop_count + math.ceil(c * plan.max_region - EPS)


def certify(g: Graph, plan: CoverPlan, c: float, family: str | None = None,
            k_cycles: int | None = None) -> BoundReport:
    """Check a concrete plan against the family's upper-bound envelope."""
    covered = set()
    for reg in plan.regions:
        covered.update(reg)
    if covered != set(range(g.n)):
        raise GraphError("plan does not cover every vertex")
    if family is None:
        family = {"spider": "spider", "cactus": "cactus"}.get(plan.case_tag, "tree")
    rep = upper_bound(g.n, family, k_cycles)
    value = plan_cost(plan, c)
    rep.witness = plan.to_dict()
    rep.witness_value = value
    rep.verdict = "PASS" if value <= rep.upper + EPS else "FAIL"
    rep.inputs = {"c": c, "n": g.n, "m": g.m, "family": family, "k_cycles": k_cycles}
    return rep


# ---------------------------------------------------------------------------
# lower-bound spiders


@dataclass(frozen=True)
class SpiderSpec:
    n: int
    short_leg_count: int
    short_leg_length: int
    long_leg_length: int
    a: float
    c: float

    def legs(self) -> list[int]:
        return [self.short_leg_length] * self.short_leg_count + [self.long_leg_length]


def lower_family_a(c: float = LOWER_C) -> float:
    """Share of short legs that balances the two lower-bound cases."""
    return (3 * c + 2 * c**3 - math.sqrt(48 * c**4 - 32 * c**6)) / (9 * c**2)


def _floor(x: float) -> int:
    return math.floor(x + EPS)


def spider_lower_family(n: int, c: float = LOWER_C, a: float | None = None) -> SpiderSpec:
    if a is None:
        a = lower_family_a(c)
    root = math.sqrt(n)
    count = _floor(a * root)
    length = _floor(c * root)
    if length == 0:
        count = 0
    long_leg = n - 1 - count * length
    if n < 2 or long_leg < 1:
        raise GraphError(f"n={n} too small for a positive long leg")
    return SpiderSpec(n, count, length, long_leg, a, c)


def realize(spec: SpiderSpec) -> Graph:
    g = spider(spec.legs() if spec.short_leg_count else [spec.long_leg_length])
    assert g.n == spec.n
    return g


def lower_bound_eval(spec: SpiderSpec, floored: bool = True) -> float:
    """Smaller of the two case bounds on the throttling number of the spider.

    Either a cop sits on every short leg's inner part, or some short leg is
    left to a far-away cop and the robber hides at its tip.  With
    ``floored=False`` the floors and ceiling are replaced by their arguments.
    """
    n = spec.n
    if floored:
        m, s = spec.short_leg_count, spec.short_leg_length
        case2 = math.ceil(math.sqrt(2 * (n - 1 - m * s)) - 0.5 - EPS) - 1 + m
    else:
        m, s = spec.a * math.sqrt(n), spec.c * math.sqrt(n)
        case2 = math.sqrt(2 * (n - 1 - m * s)) - 0.5 - 1 + m
    case1 = s + (n - 1 - (m + 1) * s) / (2 * s + 1)
    return min(case1, case2)


def lower_ratio(n: int) -> float:
    return lower_bound_eval(spider_lower_family(n)) / math.sqrt(n)


def locate_crossing(target: float = LOWER_RATIO, lo_exp: float = 4.0, hi_exp: float = 14.0,
                    steps: int = 401) -> int | None:
    """Smallest sampled n (log-spaced) from which every later sample beats ``target``."""
    ns = sorted({int(round(10 ** (lo_exp + (hi_exp - lo_exp) * i / (steps - 1)))) for i in range(steps)})
    first = None
    for n in ns:
        if lower_ratio(n) > target + EPS:
            if first is None:
                first = n
        else:
            first = None
    return first

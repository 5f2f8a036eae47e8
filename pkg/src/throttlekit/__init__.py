"""Throttling numbers for cops and robbers: exact solvers, cover planners and bounds."""

__version__ = "0.1.0"

from .graph import Graph, GraphError, ParseError, generate, parse_family, parse_graph
from .solvers import BudgetExceeded, capture_time, throttle_psd, throttle_radius, throttle_robber
from .decomposition import balanced_bipartition, limb_split, plan_cover, tree_partition
from .strategies import TreePursuit, cactus_flatten, cactus_plan, spider_cover, stationary_escape, tree_pursuit
from .bounds import certify, lower_bound_eval, path_throttle_formula, spider_lower_family, upper_bound

__all__ = [
    "Graph", "GraphError", "ParseError", "generate", "parse_family", "parse_graph",
    "BudgetExceeded", "capture_time", "throttle_psd", "throttle_radius", "throttle_robber",
    "balanced_bipartition", "limb_split", "plan_cover", "tree_partition",
    "TreePursuit", "cactus_flatten", "cactus_plan", "spider_cover", "stationary_escape", "tree_pursuit",
    "certify", "lower_bound_eval", "path_throttle_formula", "spider_lower_family", "upper_bound",
]

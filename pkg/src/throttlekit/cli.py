"""Command-line front end.

Exit codes: 0 success, 1 error, 2 certification FAIL, 3 state budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

from . import __version__
from .bounds import (
    CSV_COLUMNS,
    LOWER_RATIO,
    certify,
    lower_bound_eval,
    path_throttle_formula,
    spider_lower_family,
    upper_bound,
)
from .decomposition import CoverPlan, plan_cover
from .gambler import Camping, GamblerModel, RegionSweep, Sweep, simulate_gambler
from .graph import (
    Graph,
    GraphError,
    generate,
    is_cactus,
    is_tree,
    parse_graph,
    path,
    random_cactus,
    random_spider,
    random_tree,
    to_dot,
    to_edge_list,
    to_graph6,
)
from .solvers import (
    BudgetExceeded,
    capture_time,
    k_radius,
    psd_propagation_number,
    throttle_psd,
    throttle_radius,
    throttle_robber,
)
from .strategies import cactus_flatten, cactus_plan, guard_separation_ok, spider_cover, spider_legs

EXIT_OK, EXIT_ERROR, EXIT_FAIL, EXIT_BUDGET = 0, 1, 2, 3
CSV_VERSION = 1
SWEEP_KINDS = ("paths", "lower", "trees", "spiders", "cacti")


def _load_graph(args) -> Graph:
    if bool(args.input) == bool(args.family):
        raise GraphError("give exactly one of --input or --family")
    if args.family:
        return generate(args.family)
    with open(args.input) as fh:
        text = fh.read()
    fmt = args.format
    if fmt == "auto":
        fmt = "graph6" if args.input.endswith((".g6", ".graph6")) else "edge_list"
    return parse_graph(text, fmt)


def _config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    cfg["version"] = __version__
    return cfg


def _envelope(args, result) -> str:
    doc = {
        "command": args.command,
        "config": _config(args),
        "result": result,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _write(args, text: str) -> None:
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pick_plan(g: Graph, args) -> CoverPlan:
    planner = args.planner
    if planner == "auto":
        if is_tree(g):
            planner = "tree"
            try:
                spider_legs(g)
                planner = "spider" if args.prefer_spider else "tree"
            except GraphError:
                pass
        elif is_cactus(g):
            planner = "cactus"
        else:
            planner = "tree"
    if planner == "spider":
        return spider_cover(g)
    if planner == "cactus":
        return cactus_plan(g)
    return plan_cover(g, args.c)


def cmd_solve(args) -> int:
    g = _load_graph(args)
    budget = args.state_budget
    obj = args.objective
    if args.k is not None:
        if obj == "robber":
            res = capture_time(g, args.k, budget).to_dict()
        elif obj == "psd":
            res = {"k": args.k, "pt_plus": psd_propagation_number(g, args.k, budget)}
        else:
            res = {"k": args.k, "rad_k": k_radius(g, args.k, budget)}
    else:
        if obj == "robber":
            res = throttle_robber(g, budget, args.k_max).to_dict()
        elif obj == "psd":
            res = throttle_psd(g, budget).to_dict()
        else:
            res = throttle_radius(g, budget).to_dict()
    res["n"] = g.n
    _write(args, _envelope(args, res))
    return EXIT_OK


def cmd_plan(args) -> int:
    g = _load_graph(args)
    plan = _pick_plan(g, args)
    if args.emit == "dot":
        _write(args, to_dot(g, "plan", dict(enumerate(plan.regions))))
    else:
        _write(args, _envelope(args, plan.to_dict()))
    return EXIT_OK


def cmd_certify(args) -> int:
    g = _load_graph(args)
    plan = _pick_plan(g, args)
    rep = certify(g, plan, args.c, args.bound, args.k_cycles)
    if args.emit == "csv":
        buf = io.StringIO()
        buf.write(f"# throttlekit certify csv v{CSV_VERSION}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerow(rep.csv_row())
        _write(args, buf.getvalue())
    else:
        _write(args, _envelope(args, rep.to_dict()))
    return EXIT_OK if rep.verdict == "PASS" else EXIT_FAIL


def cmd_flatten(args) -> int:
    g = _load_graph(args)
    fr = cactus_flatten(g)
    if args.emit == "dot":
        _write(args, fr.to_dot())
    else:
        res = {
            "tree_edges": [list(e) for e in fr.tree.edges()],
            "fiber": [list(f) for f in fr.fiber],
            "anchor_map": fr.anchor_map,
            "bypass": [[m, list(e)] for m, e in fr.bypass],
        }
        _write(args, _envelope(args, res))
    return EXIT_OK


def cmd_simulate(args) -> int:
    g = _load_graph(args)
    if args.dist == "uniform":
        model = GamblerModel.uniform(g.n)
    elif args.dist == "degree":
        model = GamblerModel.degree(g)
    else:
        with open(args.dist) as fh:
            model = GamblerModel.from_json(fh.read())
    if args.policy == "camping":
        verts = args.camp if args.camp else [int(model.p.argmax())]
        policy = Camping(verts)
    elif args.policy == "sweep":
        if g != path(g.n):
            raise GraphError("sweep policy is defined on paths; use region_sweep")
        policy = Sweep.path(g.n)
    else:
        policy = RegionSweep(g, plan_cover(g, args.c))
    est = simulate_gambler(g, model, policy, args.trials, args.seed)
    _write(args, _envelope(args, est.to_dict()))
    return EXIT_OK


def cmd_family(args) -> int:
    g = _load_graph(args)
    emit = args.emit
    if emit == "dot":
        text = to_dot(g)
    elif emit == "g6":
        text = to_graph6(g) + "\n"
    elif emit == "edges":
        text = to_edge_list(g)
    else:
        text = _envelope(args, {"n": g.n, "m": g.m, "graph6": to_graph6(g)})
    _write(args, text)
    return EXIT_OK


def _sweep_sizes(args) -> list[int]:
    if args.sizes:
        return [int(float(s)) for s in args.sizes.split(",")]
    return list(range(args.n_min, args.n_max + 1))


def _sweep_row(job) -> list:
    kind, n, seed, c, budget = job
    root = math.sqrt(n)
    if kind == "paths":
        g = path(n)
        return [n, seed, path_throttle_formula(n), throttle_robber(g, budget).value,
                throttle_psd(g, budget).value, throttle_radius(g, budget).value]
    if kind == "lower":
        spec = spider_lower_family(n)
        lb = lower_bound_eval(spec)
        return [n, seed, spec.short_leg_count, spec.short_leg_length, f"{lb:.6f}",
                f"{lb / root:.9f}", int(lb / root > LOWER_RATIO)]
    if kind == "trees":
        g = random_tree(n, seed)
        plan = plan_cover(g, c)
    elif kind == "spiders":
        g = random_spider(n, seed)
        plan = spider_cover(g)
    else:
        g = random_cactus(n, seed)
        plan = cactus_plan(g)
    rep = certify(g, plan, c)
    extra = int(guard_separation_ok(g, plan)) if kind == "cacti" else ""
    return [n, seed, plan.case_tag, plan.cop_count, plan.max_region, rep.witness_value,
            f"{rep.witness_value / root:.6f}", f"{rep.upper:.6f}", rep.verdict, extra]


SWEEP_HEADERS = {
    "paths": ["n", "seed", "formula", "robber", "psd", "radius"],
    "lower": ["n", "seed", "short_legs", "short_len", "lower_bound", "ratio", "beats_target"],
    "trees": ["n", "seed", "case", "k", "max_region", "cost", "cost_per_root_n", "upper", "verdict", "guards_ok"],
}
SWEEP_HEADERS["spiders"] = SWEEP_HEADERS["cacti"] = SWEEP_HEADERS["trees"]


def cmd_sweep(args) -> int:
    kind = args.kind
    seeds = range(args.seed, args.seed + args.seeds)
    jobs = [(kind, n, s, args.c, args.state_budget) for n in _sweep_sizes(args) for s in seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    buf = io.StringIO()
    buf.write(f"# throttlekit sweep csv v{CSV_VERSION} kind={kind}\n")
    buf.write("# config " + json.dumps(_config(args), sort_keys=True) + "\n")
    buf.write("# timestamp " + datetime.now(timezone.utc).isoformat() + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADERS[kind])
    w.writerows(rows)
    _write(args, buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    env_budget = os.environ.get("THROTTLEKIT_BUDGET")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="graph file (edge list or graph6)")
    common.add_argument("--format", default="auto", choices=["auto", "edge_list", "graph6"])
    common.add_argument("--family", help="generated family, e.g. random_tree:400:seed=1")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--c", type=float, default=0.5, help="time weight in the cover planner")
    common.add_argument("--state-budget", type=int, default=int(env_budget) if env_budget else None)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--out", help="output path (default stdout)")

    p = argparse.ArgumentParser(prog="throttlekit", description="Cops-and-robbers throttling toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="exact throttling numbers")
    s.add_argument("--objective", choices=["robber", "psd", "radius"], default="robber")
    s.add_argument("--k", type=int, help="fixed number of cops (or seed size)")
    s.add_argument("--k-max", type=int)
    s.add_argument("--emit", choices=["json"], default="json")
    s.set_defaults(func=cmd_solve)

    for name, func, emits in (("plan", cmd_plan, ["json", "dot"]), ("certify", cmd_certify, ["json", "csv"])):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--planner", choices=["auto", "tree", "spider", "cactus"], default="auto")
        s.add_argument("--prefer-spider", action="store_true", help="use the spider planner on spiders in auto mode")
        s.add_argument("--emit", choices=emits, default="json")
        if name == "certify":
            s.add_argument("--bound", choices=["tree", "chordal", "spider", "cactus", "cycles_k",
                                               "gambler_u", "gambler_1"])
            s.add_argument("--k-cycles", type=int)
        s.set_defaults(func=func)

    s = sub.add_parser("flatten", parents=[common], help="flatten a cactus into a tree")
    s.add_argument("--emit", choices=["json", "dot"], default="json")
    s.set_defaults(func=cmd_flatten)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo gambler capture time")
    s.add_argument("--policy", choices=["camping", "sweep", "region_sweep"], default="camping")
    s.add_argument("--camp", type=int, nargs="*", help="vertices for the camping policy")
    s.add_argument("--dist", default="uniform", help="uniform, degree, or a JSON file with {\"p\": [...]}")
    s.add_argument("--trials", type=int, default=10000)
    s.add_argument("--emit", choices=["json"], default="json")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("family", parents=[common], help="generate a graph family member")
    s.add_argument("--emit", choices=["json", "dot", "g6", "edges"], default="edges")
    s.set_defaults(func=cmd_family)

    s = sub.add_parser("sweep", parents=[common], help="CSV table over a range of orders")
    s.add_argument("--kind", choices=SWEEP_KINDS, default="paths")
    s.add_argument("--sizes", help="comma separated orders (overrides --n-min/--n-max)")
    s.add_argument("--n-min", type=int, default=2)
    s.add_argument("--n-max", type=int, default=25)
    s.add_argument("--seeds", type=int, default=1)
    s.add_argument("--emit", choices=["csv"], default="csv")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.state_budget is not None and args.state_budget <= 0:
        parser.error("--state-budget must be positive")
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    try:
        return args.func(args)
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (GraphError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR

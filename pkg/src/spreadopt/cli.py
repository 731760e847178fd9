"""Command-line interface.

Every command reads an edge-list graph and prints a JSON report to
stdout.  Reports are deterministic: keys are sorted, floats are rounded
to 12 significant digits and wall-clock time is only included with
``--timing``.

Exit codes: 0 success, 2 input error, 3 budget exceeded, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import __version__
from .cover import EXACT_COVER_LIMIT, exact_min_cover, maximal_matching_cover
from .curvature import elemental_curvature, gamma_max_marginal, tradeoff, tradeoff_table
from .errors import EmptyTargetError, NoValidPairsError, SpreadError
from .graph import Graph, is_bipartite, read_graph
from .greedoid import build_greedoid, feasible_seeds
from .hitting import Objective, hitting_times, mc_hitting
from .optimize import brute_force_optimum, cover_seeds, greedy, seeded_search
from .ranking import ENUMERATION_BUDGET, enumerate_class, rank_context

SCHEMA = "spreadopt/1"
DEFAULT_NUS = (0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 1.0)

log = logging.getLogger("spreadopt")


# --- formatting helpers -----------------------------------------------------


def _round(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def dumps(report: dict) -> str:
    return json.dumps(_round(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _labels(g: Graph, nodes) -> list[str]:
    return list(g.labels_of(g.mask(nodes)))


def _parse_set(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _write_csv(directory: str, name: str, header: list[str], rows) -> None:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / name, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])


def _trace_json(g: Graph, tr) -> dict:
    return {
        "seed": _labels(g, tr.seed),
        "steps": [{"node": lab, "F": f} for lab, f in tr.steps],
        "final": _labels(g, tr.final),
        "F": tr.final_f,
        "rank": tr.final_rank,
    }


def _ctx_json(g: Graph, ctx) -> dict:
    return {
        "C": ctx.C,
        "Fmax": ctx.fmax,
        "Fmin": ctx.fmin,
        "cover": _labels(g, ctx.cover),
        "cover_source": ctx.cover_source,
        "worst_node": ctx.worst,
    }


def _class_json(g: Graph, cls, with_members: bool = True) -> dict:
    out = {
        "nu": cls.nu,
        "C": cls.C,
        "m": cls.m,
        "size": len(cls),
        "level_max_rank": list(cls.level_max[1:]),
    }
    if with_members:
        out["members"] = [
            {"set": list(g.labels_of(x)), "rank": cls.ranks[x]} for x in cls.masks
        ]
    return out


def _greedoid_json(g: Graph, fam, with_sets: bool = True) -> dict:
    rep = fam.report
    out = {
        "m": fam.m,
        "size": len(fam),
        "axioms": {
            "G1": rep.g1,
            "G2": rep.g2,
            "G3": rep.g3,
            "passed": rep.passed,
            "G2_counterexample": None
            if rep.g2_counterexample is None
            else _labels(g, rep.g2_counterexample),
            "G3_counterexample": None
            if rep.g3_counterexample is None
            else [_labels(g, s) for s in rep.g3_counterexample],
        },
        "rejected_base_sets": [_labels(g, s) for s in fam.rejected],
        "culled_lower_sets": fam.culled_lower,
        "culling_order": "label-lexicographic",
    }
    if with_sets:
        out["feasible"] = [
            {"set": list(g.labels_of(x)), "provenance": fam.provenance[x]} for x in fam.masks
        ]
    return out


def _curvature_json(g: Graph, rep) -> dict:
    s, i, j = rep.argmax
    return {
        "kappa": rep.kappa,
        "domain": rep.domain,
        "samples": rep.samples,
        "skipped": rep.skipped,
        "argmax": {"S": _labels(g, s), "i": i, "j": j},
        "attained_on_extended_set": rep.extended,
        "domain_note": rep.domain_note,
    }


def _tradeoff_json(res) -> dict:
    return {"nu": res.nu, "r": res.r_of_nu, "m": res.m_of_nu}


# --- commands ---------------------------------------------------------------


def cmd_objective(g: Graph, args) -> dict:
    target = _parse_set(args.set)
    if not target:
        raise EmptyTargetError("target set is empty")
    prof = hitting_times(g, target)
    return {
        "target": _labels(g, target),
        "F": prof.total,
        "hitting_times": prof.times,
    }


def cmd_hitting(g: Graph, args) -> dict:
    target = _parse_set(args.set)
    if not target:
        raise EmptyTargetError("target set is empty")
    prof = hitting_times(g, target, method=args.method)
    return {"target": _labels(g, target), "method": args.method, "hitting_times": prof.times, "F": prof.total}


def cmd_cover(g: Graph, args) -> dict:
    mc = maximal_matching_cover(g)
    out = {
        "matching": [list(e) for e in mc.matching],
        "cover": _labels(g, mc.cover),
        "C": mc.C,
    }
    if args.exact or g.n <= 20:
        exact = exact_min_cover(g, limit=g.n if args.exact else EXACT_COVER_LIMIT)
        out["exact_min_cover"] = _labels(g, exact)
        out["exact_min_size"] = len(exact)
    return out


def cmd_rank(g: Graph, args) -> dict:
    ctx = rank_context(g, args.c)
    target = _parse_set(args.set)
    return {"context": _ctx_json(g, ctx), "set": _labels(g, target), "rank": ctx.rank(target)}


def cmd_class(g: Graph, args) -> dict:
    ctx = rank_context(g, args.c)
    cls = enumerate_class(g, args.nu, ctx=ctx, budget=args.budget)
    if args.csv:
        _write_csv(
            args.csv,
            "class_members.csv",
            ["set", "size", "rank", "F"],
            ((" ".join(g.labels_of(x)), x.bit_count(), cls.ranks[x], ctx.objective(x)) for x in cls.masks),
        )
    return {"context": _ctx_json(g, ctx), "class": _class_json(g, cls)}


def _seeds_for(g: Graph, cls, source: str):
    if source == "cover":
        return cover_seeds(cls), None
    fam = build_greedoid(cls)
    return feasible_seeds(fam), fam


def cmd_solve(g: Graph, args) -> dict:
    obj = Objective(g)
    K = args.k
    if args.method == "brute":
        best, f = brute_force_optimum(g, K, obj, budget=args.budget)
        return {"method": "brute", "K": K, "best": _labels(g, best), "F": f, "certified": True}
    if args.method == "greedy":
        tr = greedy(g, K, obj)
        return {"method": "greedy", "K": K, "best": _labels(g, tr.final), "F": tr.final_f, "trace": _trace_json(g, tr)}

    if args.nu is None:
        raise ValueError("--method seeded needs --nu")
    ctx = rank_context(g, args.c, objective=obj)
    cls = enumerate_class(g, args.nu, ctx=ctx, budget=args.budget)
    if K < cls.m:
        raise ValueError(f"K = {K} is below the class minimum size m = {cls.m}")
    seeds, fam = _seeds_for(g, cls, args.seed_source)
    res = seeded_search(g, seeds, K, obj, ctx, certify=not args.no_certify, budget=args.budget)
    if args.csv:
        rows = []
        for t, tr in enumerate(res.traces):
            seed = " ".join(_labels(g, tr.seed))
            rows.append((t, seed, 0, "", obj(g.mask(tr.seed))))
            rows.extend((t, seed, k + 1, lab, f) for k, (lab, f) in enumerate(tr.steps))
        _write_csv(args.csv, "traces.csv", ["trace", "seed", "step", "added", "F"], rows)
    return {
        "method": "seeded",
        "K": K,
        "seed_source": args.seed_source,
        "context": _ctx_json(g, ctx),
        "class": _class_json(g, cls, with_members=False),
        "seeds": [_labels(g, s) for s in seeds],
        "best": _labels(g, res.best),
        "F": res.best_f,
        "rank": res.best_rank,
        "certified": res.certified,
        "optimum": None if res.optimum is None else _labels(g, res.optimum),
        "optimum_F": res.optimum_f,
        "traces": [_trace_json(g, tr) for tr in res.traces],
        "greedoid": None if fam is None else _greedoid_json(g, fam, with_sets=False),
    }


def cmd_greedoid(g: Graph, args) -> dict:
    ctx = rank_context(g, args.c)
    cls = enumerate_class(g, args.nu, ctx=ctx, budget=args.budget)
    fam = build_greedoid(cls)
    return {
        "context": _ctx_json(g, ctx),
        "class": _class_json(g, cls, with_members=False),
        "greedoid": _greedoid_json(g, fam),
        "canonical_text": fam.to_text(),
    }


def _curvature_block(g: Graph, ctx, cls, domain: str, budget: int) -> dict:
    gamma, (gs, gj) = gamma_max_marginal(ctx, ctx.cover, budget=budget)
    out = {"gamma": gamma, "gamma_argmax": {"S": _labels(g, gs), "j": gj}}
    try:
        rep = elemental_curvature(cls, domain=domain, budget=budget)
    except NoValidPairsError as exc:
        out["kappa_available"] = False
        out["kappa_reason"] = str(exc)
        return out
    out["kappa_available"] = True
    out.update(_curvature_json(g, rep))
    return out


def cmd_curvature(g: Graph, args) -> dict:
    ctx = rank_context(g, args.c)
    cls = enumerate_class(g, args.nu, ctx=ctx, budget=args.budget)
    block = _curvature_block(g, ctx, cls, args.domain, args.budget)
    out = {"context": _ctx_json(g, ctx), "class": _class_json(g, cls, with_members=False), "curvature": block}
    if args.target_nu is not None and block["kappa_available"]:
        res = tradeoff(block["gamma"], block["kappa"], ctx.C, args.target_nu)
        out["tradeoff"] = _tradeoff_json(res) | {"curve": list(res.curve)}
    return out


def cmd_analyze(g: Graph, args) -> dict:
    ctx = rank_context(g, args.c)
    cls = enumerate_class(g, args.nu, ctx=ctx, budget=args.budget)
    fam = build_greedoid(cls)
    block = _curvature_block(g, ctx, cls, args.domain, args.budget)
    out = {
        "context": _ctx_json(g, ctx),
        "class": _class_json(g, cls),
        "greedoid": _greedoid_json(g, fam, with_sets=False),
        "curvature": block,
        "tradeoff": None,
    }
    if block["kappa_available"]:
        nus = [float(x) for x in args.nus.split(",")] if args.nus else list(DEFAULT_NUS)
        table = tradeoff_table(block["gamma"], block["kappa"], ctx.C, nus)
        out["tradeoff"] = {
            "table": [_tradeoff_json(r) for r in table],
            "curve": list(table[0].curve),
            "actual_m": cls.m,
        }
        if args.csv:
            _write_csv(args.csv, "tradeoff.csv", ["nu", "r", "m"], ((r.nu, r.r_of_nu, r.m_of_nu) for r in table))
            _write_csv(args.csv, "tradeoff_curve.csv", ["r", "bound"], enumerate(table[0].curve))
    if args.csv:
        _write_csv(
            args.csv,
            "class_members.csv",
            ["set", "size", "rank", "F"],
            ((" ".join(g.labels_of(x)), x.bit_count(), cls.ranks[x], ctx.objective(x)) for x in cls.masks),
        )
    return out


def cmd_simulate(g: Graph, args) -> dict:
    target = _parse_set(args.set)
    if not target:
        raise EmptyTargetError("target set is empty")
    prof = hitting_times(g, target)
    starts = _parse_set(args.node) if args.node else list(prof.times)
    rows = {}
    for lab in starts:
        est = mc_hitting(g, target, lab, walks=args.walks, seed=args.seed)
        exact = prof.times[str(lab)]
        z = (est.mean - exact) / est.stderr if est.stderr > 0 else (0.0 if est.mean == exact else math.inf)
        rows[str(lab)] = {
            "mc_mean": est.mean,
            "mc_stderr": est.stderr,
            "exact": exact,
            "z": z,
            "within_3se": abs(z) <= 3,
        }
    return {"target": _labels(g, target), "walks": args.walks, "estimates": rows}


COMMANDS = {
    "objective": cmd_objective,
    "hitting": cmd_hitting,
    "cover": cmd_cover,
    "rank": cmd_rank,
    "class": cmd_class,
    "solve": cmd_solve,
    "greedoid": cmd_greedoid,
    "curvature": cmd_curvature,
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spreadopt", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", required=True, help="edge-list file")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", metavar="DIR", help="also write flat CSV tables into DIR")
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--budget", type=int, default=ENUMERATION_BUDGET, help="enumeration budget")
    common.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identity)")

    def cap(p):
        p.add_argument("--c", type=int, default=None, help="cardinality cap (default: matching cover size)")
        p.add_argument("--c-auto", action="store_true", help="take C from the matching cover (default)")

    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("objective", parents=[common], help="F(A) and hitting times")
    p.add_argument("--set", required=True, help="comma-separated labels")
    p = sub.add_parser("hitting", parents=[common], help="hitting-time profile")
    p.add_argument("--set", required=True)
    p.add_argument("--method", choices=["auto", "dense", "sparse", "fixed_point"], default="auto")
    p = sub.add_parser("cover", parents=[common], help="matching cover and exact minimum cover")
    p.add_argument("--exact", action="store_true", help="force the exact cover search")
    p = sub.add_parser("rank", parents=[common], help="rank of a set")
    p.add_argument("--set", required=True)
    cap(p)
    for name, helptext in (
        ("class", "enumerate the near-optimal class"),
        ("greedoid", "build the greedoid of the near-optimal class"),
        ("curvature", "elemental curvature and gamma"),
        ("analyze", "class, greedoid, curvature and trade-off table"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--nu", type=float, required=True)
        cap(p)
        if name in ("curvature", "analyze"):
            p.add_argument("--domain", choices=["members", "all"], default="members")
        if name == "curvature":
            p.add_argument("--target-nu", type=float, default=None)
        if name == "analyze":
            p.add_argument("--nus", default=None, help="comma-separated quality levels for the table")
    p = sub.add_parser("solve", parents=[common], help="minimise F over sets of size <= K")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=["brute", "greedy", "seeded"], default="seeded")
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--seed-source", choices=["cover", "greedoid"], default="cover")
    p.add_argument("--no-certify", action="store_true")
    cap(p)
    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo hitting times vs exact")
    p.add_argument("--set", required=True)
    p.add_argument("--node", default=None, help="start nodes (default: all outside the set)")
    p.add_argument("--walks", type=int, default=10_000)
    return ap


def _echo(args) -> dict:
    skip = {"out", "timing"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    if getattr(args, "c_auto", False):
        args.c = None
    start = time.perf_counter()
    try:
        g = read_graph(args.graph)
        bip = is_bipartite(g)
        if bip:
            log.warning("graph is bipartite: the walk is periodic (hitting times are still finite)")
        payload = COMMANDS[args.command](g, args)
    except SpreadError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    report = {
        "schema": SCHEMA,
        "command": {"name": args.command, "args": _echo(args)},
        "graph": {
            "N": g.n,
            "edges": len(g.edges),
            "bipartite": bip,
            "weighted": g.weights is not None,
        },
        "seed": args.seed,
        "result": payload,
    }
    if args.timing:
        report["wall_time_s"] = time.perf_counter() - start
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

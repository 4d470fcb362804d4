"""Command-line entry point.

Machine-readable output is JSON lines on stdout; human-readable
summaries go to stderr.  Every run starts with a provenance record
(package version plus a hash of the effective configuration) so that
identical configs are recognizable across runs.  No timestamps or
worker-dependent values appear in any output: identical configs must
produce byte-identical reports and catalogs.

Exit codes: 0 success, 2 validation failure, 3 resource exhaustion
(budget hit, search cap reached), 4 internal invariant violation.
"""

import argparse
import hashlib
import json
import sys

from . import __version__
from .graphs import Graph, RamseyType, is_ramsey
from .graph6 import graph6_decode, graph6_encode
from .canon import canonical_key
from .catalog import Catalog, CensusSpec, load_catalog, verify_catalog
from .census import census, census_by_cone_glue
from .analysis import (
    FilterSpec,
    catalog_filter,
    degree_bounds,
    excess_total,
)
from .glue import (
    CampaignConfig,
    default_seed_rules,
    glue_problem_variants,
    pointed_graphs,
    run_campaign,
    schedule_pairs,
    seed_c1,
    solve_glue,
)
from . import sat as satmod

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3
EXIT_INVARIANT = 4


def _emit(record):
    sys.stdout.write(json.dumps(record, sort_keys=True) + "\n")
    sys.stdout.flush()


def _say(msg):
    sys.stderr.write(msg + "\n")
    sys.stderr.flush()


def _provenance(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    _emit(
        {
            "event": "run",
            "version": __version__,
            "config_hash": hashlib.sha256(blob).hexdigest()[:12],
            "command": args.subcommand,
        }
    )


def _load_graph6_arg(text):
    return graph6_decode(text.encode("ascii"))


def _progress_printer(args):
    if args.quiet:
        return None

    def cb(ev):
        _say("  " + json.dumps(ev, sort_keys=True))

    return cb


def cmd_census(args):
    rt = RamseyType(args.s, args.t)
    spec = CensusSpec(rt, args.n, e_min=args.e_min, e_max=args.e_max)
    base = load_catalog(args.base) if args.base else None
    if args.via == "cone":
        cat = census_by_cone_glue(spec, workers=args.workers)
    else:
        cat = census(
            spec,
            workers=args.workers,
            checkpoint_dir=args.checkpoint,
            base=base,
        )
    saved = None
    if args.out:
        saved = cat.save(args.out, shard_by_edges=args.shard)
    lo, hi = cat.edge_range() if cat.members else (None, None)
    rec = {
        "event": "census",
        "s": rt.s,
        "t": rt.t,
        "n": spec.n,
        "members": len(cat.members),
        "e_min": lo,
        "e_max": hi,
    }
    if saved:
        rec["path"] = saved
    _emit(rec)
    _say(
        f"census ({rt.s},{rt.t}) n={spec.n}: {len(cat.members)} graphs"
        + (f", edges {lo}..{hi}" if cat.members else "")
    )
    return EXIT_OK


def cmd_table(args):
    rt = RamseyType(args.s, args.t)
    prev = None
    for n in range(1, args.max_n + 1):
        cat = census(CensusSpec(rt, n), workers=args.workers, base=prev)
        if not cat.members:
            _emit({"event": "table-row", "n": n, "total": 0})
            _say(f"n={n}: empty; stopping")
            break
        counts = cat.counts_by_edges()
        lo, hi = cat.edge_range()
        row = {
            "event": "table-row",
            "n": n,
            "total": len(cat.members),
            "e_min": lo,
            "e_max": hi,
            "n_at": [
                counts.get(lo, 0),
                counts.get(lo + 1, 0),
                counts.get(hi - 1, 0),
                counts.get(hi, 0),
            ],
        }
        if args.out:
            row["path"] = cat.save(args.out)
        _emit(row)
        _say(
            f"n={n}: total {row['total']}, edges {lo}..{hi}, "
            f"N at extremes {row['n_at']}"
        )
        prev = cat
    return EXIT_OK


def cmd_excess_check(args):
    cat = load_catalog(args.catalog)
    checked = 0
    nonzero = 0
    for g in cat.graphs():
        if excess_total(g) != 0:
            nonzero += 1
        checked += 1
    _emit({"event": "excess-check", "checked": checked, "nonzero": nonzero})
    if nonzero:
        _say(f"excess nonzero on {nonzero} of {checked} graphs")
        return EXIT_INVARIANT
    _say(f"all zero ({checked} graphs)")
    return EXIT_OK


def cmd_ramsey_number(args):
    rt = RamseyType(args.s, args.t)
    prev = None
    for n in range(1, args.max_n + 1):
        cat = census(CensusSpec(rt, n), workers=args.workers, base=prev)
        if not cat.members:
            witnesses = len(prev.members) if prev else 0
            rec = {
                "event": "ramsey-number",
                "s": rt.s,
                "t": rt.t,
                "value": n,
                "witnesses": witnesses,
            }
            if prev and prev.members:
                rec["witness"] = sorted(prev.members)[0].decode("ascii")
            _emit(rec)
            _say(f"R({rt.s},{rt.t}) = {n} with {witnesses} witnesses at n={n - 1}")
            return EXIT_OK
        prev = cat
    _emit({"event": "ramsey-number", "s": rt.s, "t": rt.t, "value": None})
    _say(f"no empty census up to n={args.max_n}")
    return EXIT_RESOURCE


def _single_problems(args, rt):
    g1 = _load_graph6_arg(args.g1)
    g2 = _load_graph6_arg(args.g2)

    def pointed_at(g, a):
        for p in pointed_graphs(g):
            if p.a == a:
                return p
        # requested vertex was removed as a duplicate class; rebuild directly
        nb = g.adj[a]
        from .glue import PointedGraph

        k_map = []
        m = nb
        while m:
            b = m & -m
            k_map.append(b.bit_length() - 1)
            m ^= b
        return PointedGraph(
            g=g, a=a, k=g.induced(nb), k_map=tuple(k_map), difficulty=0
        )

    pg1 = pointed_at(g1, args.a1 if args.a1 is not None else 0)
    pg2 = pointed_at(g2, args.a2 if args.a2 is not None else 0)
    problems = glue_problem_variants(
        pg1, pg2, args.target_n, rt, final_n=args.final_n
    )
    rules = None
    if args.no_seeds:
        rules = ()
    elif args.min_degree is not None:
        rules = default_seed_rules(min_degree=args.min_degree)
    return [seed_c1(p, rules=rules) for p in problems]


def cmd_glue(args):
    rt = RamseyType(args.s, args.t)
    problems = _single_problems(args, rt)
    if not problems:
        _emit({"event": "glue", "variants": 0, "status": "unsat"})
        _say("no identification between the two neighborhoods; nothing to glue")
        return EXIT_OK
    any_undecided = False
    total = 0
    for i, p in enumerate(problems):
        res = solve_glue(
            p, mode=args.mode, budget=args.budget, symmetry=not args.no_symmetry
        )
        rec = {
            "event": "glue-variant",
            "variant": i,
            "status": res.status,
            "free_pairs": len(p.free_pairs),
            "assignments": res.assignment_count,
            "notices": p.meta.get("notices", []),
        }
        if args.mode == "all":
            rec["solutions"] = [
                graph6_encode(g).decode("ascii") for g in res.graphs
            ]
            total += len(res.graphs)
        _emit(rec)
        if res.status == "undecided":
            any_undecided = True
    _say(f"{len(problems)} variant(s), {total} solution graph(s)")
    if any_undecided:
        _say("budget exhausted on at least one variant")
        return EXIT_RESOURCE
    return EXIT_OK


def cmd_campaign(args):
    rt = RamseyType(args.s, args.t)
    graphs = []
    for path in args.inputs:
        graphs.extend(load_catalog(path).graphs())
    pairs = schedule_pairs(graphs, k=args.k)
    rules = None
    if args.no_seeds:
        rules = ()
    elif args.min_degree is not None:
        rules = default_seed_rules(min_degree=args.min_degree)
    config = CampaignConfig(
        rt=rt,
        final_n=args.final_n,
        c1_start=args.c1_start,
        budget=args.budget,
        symmetry=not args.no_symmetry,
        rules=rules,
        workers=args.workers,
    )
    report = run_campaign(
        pairs,
        config,
        progress=(lambda ev: _say("  " + json.dumps(ev, sort_keys=True)))
        if not args.quiet
        else None,
    )
    for ph in report.phases:
        _emit(dict(ph, event="campaign-phase"))
    _emit(
        {
            "event": "campaign",
            "status": report.status,
            "solutions": [
                graph6_encode(g).decode("ascii") for g in report.solutions
            ],
            "undecided": [list(u) for u in report.undecided],
        }
    )
    _say(
        f"campaign over {len(pairs)} pairs: {report.status}, "
        f"{len(report.solutions)} solution(s), {len(report.undecided)} undecided"
    )
    if report.undecided:
        return EXIT_RESOURCE
    return EXIT_OK


def cmd_filter(args):
    cat = load_catalog(args.catalog)
    fs = FilterSpec(
        min_degree=args.min_degree,
        max_degree=args.max_degree,
        e_min=args.e_min,
        e_max=args.e_max,
        contains=_load_graph6_arg(args.contains) if args.contains else None,
        lacks=_load_graph6_arg(args.lacks) if args.lacks else None,
        nonadjacent_pair_degree_max=args.nonadjacent_pair_degree_max,
    )
    kept = catalog_filter(cat, fs, workers=args.workers)
    for key in sorted(kept.members):
        _emit({"event": "member", "graph6": key.decode("ascii")})
    _emit(
        {
            "event": "filter",
            "input": len(cat.members),
            "kept": len(kept.members),
            "predicate": fs.describe(),
        }
    )
    _say(f"{len(kept.members)} of {len(cat.members)} graphs match")
    if args.out:
        kept.save(args.out)
    return EXIT_OK


def cmd_export_dimacs(args):
    import os

    rt = RamseyType(args.s, args.t)
    problems = _single_problems(args, rt)
    os.makedirs(args.out, exist_ok=True)
    for i, p in enumerate(problems):
        cnf = satmod.encode(p, symmetry=not args.no_symmetry)
        path = os.path.join(args.out, f"variant{i}.cnf")
        with open(path, "wb") as fh:
            fh.write(satmod.to_dimacs(cnf))
        decode_path = os.path.join(args.out, f"variant{i}.decode.json")
        with open(decode_path, "w") as fh:
            json.dump(
                {
                    "n": p.n,
                    "rows": list(p.rows),
                    "pair_vars": [list(pr) for pr in cnf.decode],
                    "meta": cnf.meta,
                },
                fh,
                sort_keys=True,
            )
        _emit(
            {
                "event": "dimacs",
                "variant": i,
                "path": path,
                "vars": cnf.var_count,
                "clauses": len(cnf.clauses),
            }
        )
    _say(f"wrote {len(problems)} CNF file(s) to {args.out}")
    return EXIT_OK


def _add_workers(p):
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--quiet", action="store_true")


def _add_glue_args(p):
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    p.add_argument("--g1", required=True, help="graph6 of the first side")
    p.add_argument("--a1", type=int, default=None, help="point vertex in g1")
    p.add_argument("--g2", required=True, help="graph6 of the second side")
    p.add_argument("--a2", type=int, default=None, help="point vertex in g2")
    p.add_argument("--target-n", type=int, required=True)
    p.add_argument("--final-n", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--no-symmetry", action="store_true")
    p.add_argument("--no-seeds", action="store_true")
    p.add_argument("--min-degree", type=int, default=None)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="ramseykit",
        description="Censuses, analysis and gluing search for clique/"
        "independence-bounded graphs",
    )
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("census", help="build a census catalog")
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--e-min", type=int, default=None)
    p.add_argument("--e-max", type=int, default=None)
    p.add_argument("--out", default=None, help="directory to save the catalog")
    p.add_argument("--base", default=None, help="existing catalog to extend")
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--shard", action="store_true", help="shard members by edge count")
    p.add_argument("--via", choices=["extensions", "cone"], default="extensions")
    _add_workers(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("table", help="totals and edge extremes per order")
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--out", default=None, help="save each level's catalog under this root")
    _add_workers(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("excess-check", help="verify the excess identity over a catalog")
    p.add_argument("catalog")
    _add_workers(p)
    p.set_defaults(func=cmd_excess_check)

    p = sub.add_parser("ramsey-number", help="least order with an empty census")
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    p.add_argument("--max-n", type=int, default=20)
    _add_workers(p)
    p.set_defaults(func=cmd_ramsey_number)

    p = sub.add_parser("glue", help="solve a single gluing problem")
    _add_glue_args(p)
    p.add_argument("--mode", choices=["all", "first", "count"], default="all")
    _add_workers(p)
    p.set_defaults(func=cmd_glue)

    p = sub.add_parser("campaign", help="gluing campaign over a catalog")
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    p.add_argument("--final-n", type=int, required=True)
    p.add_argument(
        "--inputs", required=True, nargs="+",
        help="catalog dir(s) of side graphs (several orders allowed)",
    )
    p.add_argument("--k", type=int, default=1, help="drop the k-1 hardest points")
    p.add_argument("--c1-start", type=int, default=1)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--no-symmetry", action="store_true")
    p.add_argument("--no-seeds", action="store_true")
    p.add_argument("--min-degree", type=int, default=None)
    _add_workers(p)
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("filter", help="select catalog members by predicates")
    p.add_argument("catalog")
    p.add_argument("--min-degree", type=int, default=None)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--e-min", type=int, default=None)
    p.add_argument("--e-max", type=int, default=None)
    p.add_argument("--contains", default=None, help="graph6 induced subgraph")
    p.add_argument("--lacks", default=None, help="graph6 forbidden induced subgraph")
    p.add_argument("--nonadjacent-pair-degree-max", type=int, default=None)
    p.add_argument("--out", default=None)
    _add_workers(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("export-dimacs", help="write gluing problems as DIMACS CNF")
    _add_glue_args(p)
    p.add_argument("--out", required=True)
    _add_workers(p)
    p.set_defaults(func=cmd_export_dimacs)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    _provenance(args)
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError, NotADirectoryError) as e:
        _say(f"error: {e}")
        return EXIT_VALIDATION
    except AssertionError as e:
        _say(f"invariant violation: {e}")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())

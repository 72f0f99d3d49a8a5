"""
Command-line harness: generate instances, solve them, run ratio experiments
and check the hardness reductions.

    python -m pairnet.cli gen tight-mst --lambda 4 --out tight.json
    python -m pairnet.cli solve --instance tight.json --kind mst --objective min-sum --engine approx
    python -m pairnet.cli experiment --config data_demo/configs/random_mst_minsum.json
    python -m pairnet.cli verify-reduction --cnf data_demo/cnf/sat_1in3.cnf --flavor 1in3
    python -m pairnet.cli validate --instance tight.json

Exit codes: 0 ok, 1 usage, 2 validation failure, 3 theorem bound violated.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pairnet import weights as W
from pairnet.approx import approximate
from pairnet.cnf import Flavor, is_satisfiable, read_dimacs, satisfying_assignments
from pairnet.config import ExperimentConfig, SolverCaps, load_experiment_config, read_plan
from pairnet.cyclecover import find_c6_cover
from pairnet.errors import PairnetError
from pairnet.generators import (
    RANDOM_MODELS,
    gen_random_metric,
    gen_tight_mst,
    gen_tight_tsp,
    lift_colocated,
    random_matrix,
)
from pairnet.instance import (
    Objective,
    StructureKind,
    cost,
    instance_summary,
    read_instance,
    read_solution,
    validate_metric,
    validate_solution,
    write_instance,
    write_solution,
)
from pairnet.oracle import exact_opt
from pairnet.reductions import (
    MODE_ALIASES,
    MODES,
    hardness_accounting,
    reduce_1in3_to_2matching,
    reduce_3sat_to_2mst,
    verify_forward_2matching,
    verify_forward_2mst,
)
from pairnet.reports import (
    DB_TABLE,
    bound_violations,
    load_report,
    run_experiment,
    with_summary,
    write_csv,
    write_jsonl,
)

logger = logging.getLogger("pairnet.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_BOUND = 3

FAMILIES = ["tight-mst", "tight-tsp", "lift", "random", "reduce-3sat", "reduce-1in3"]


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse with exit code 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _caps(args) -> SolverCaps:
    caps = SolverCaps()
    updates = {}
    if getattr(args, "tsp_cap", None):
        updates["tsp_cap"] = args.tsp_cap
    if getattr(args, "matching_cap", None):
        updates["matching_cap"] = args.matching_cap
    if getattr(args, "c6_cap", None):
        updates["c6_real_nodes"] = args.c6_cap
    caps = caps.model_copy(update=updates)
    if getattr(args, "oracle_cap", None):
        caps = caps.with_oracle_cap(args.oracle_cap)
    return caps


def _describe(instance) -> str:
    summary = instance_summary(instance)
    flavor = "integral" if summary["integral"] else "rational"
    return (
        f"{summary['n_pairs']} pairs, {summary['n_nodes']} nodes, "
        f"{summary['distinct_weights']} distinct {flavor} weights up to {summary['max_weight']}"
    )


def _write_json(doc, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args) -> int:
    out = Path(args.out)
    annotations = None
    if args.family == "tight-mst":
        instance = gen_tight_mst(args.lam, args.eps)
    elif args.family == "tight-tsp":
        instance = gen_tight_tsp(args.lam, args.eps)
    elif args.family == "random":
        instance = gen_random_metric(args.pairs, args.seed, args.model)
    elif args.family == "lift":
        if args.base:
            with open(args.base, "r", encoding="utf-8") as f:
                base = json.load(f)["weights"]
            base = [[W.as_weight(x) for x in row] for row in base]
        else:
            base, _ = random_matrix(args.cities, args.seed, args.model)
        instance = lift_colocated(base)
    else:
        if not args.cnf:
            raise UsageError(f"{args.family} needs --cnf")
        if args.family == "reduce-3sat":
            artifacts = reduce_3sat_to_2mst(read_dimacs(args.cnf, Flavor.THREE_SAT), args.mode)
        else:
            artifacts = reduce_1in3_to_2matching(read_dimacs(args.cnf, Flavor.MONOTONE_ONE_IN_THREE))
            if args.dot:
                artifacts.graph.write_dot(args.dot)
                print(f"📁 Wrote dummy graph DOT to {args.dot}")
        instance = artifacts.instance
        annotations = {str(k): v for k, v in sorted(artifacts.annotations.items())}

    write_instance(instance, out)
    print(f"📁 Wrote {args.family} instance to {out} ({instance.n_nodes} nodes, {instance.n_pairs} pairs)")
    if annotations is not None:
        ann_path = Path(args.annotations) if args.annotations else out.with_suffix(".annotations.json")
        _write_json(annotations, ann_path)
        print(f"📁 Wrote node annotations to {ann_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    instance = read_instance(args.instance)
    print(f"📊 {_describe(instance)}")
    kind, objective = StructureKind(args.kind), Objective(args.objective)
    caps = _caps(args)
    if args.engine == "approx":
        plan = read_plan(args.plan) if args.plan else None
        solution = approximate(instance, kind, plan)
        value = cost(instance, solution, objective)
    else:
        result = exact_opt(instance, kind, objective, caps, args.jobs)
        solution, value = result.best_solution, result.best_value
        print(f"📊 Examined {result.colorings_examined} colorings")

    problems = validate_solution(instance, solution)
    if problems:
        for p in problems:
            print(f"❌ {p.rule}: {p.detail}")
        return EXIT_VALIDATION
    if args.out:
        write_solution(solution, args.out, extra={"objective": objective.value, "value": W.to_json(value)})
        print(f"📁 Wrote solution to {args.out}")
    print(f"✅ {kind.value}/{objective.value} ({args.engine}) = {W.to_text(value)} ({W.to_decimal(value)})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# experiment


def _experiment_config(args) -> ExperimentConfig:
    config = load_experiment_config(args.config) if args.config else ExperimentConfig()
    updates = {}
    for key in ("kind", "objective", "csv", "jsonl", "db", "jobs"):
        value = getattr(args, key, None)
        if value is not None:
            updates[key] = value
    if updates:
        config = ExperimentConfig.model_validate({**config.model_dump(), **updates})
    caps = _caps(args)
    if caps != SolverCaps():
        config = config.model_copy(update={"caps": caps})
    return config


def cmd_experiment(args) -> int:
    config = _experiment_config(args)
    print(f"🚀 Running {config.kind.value}/{config.objective.value} on {config.source.family} instances")
    frame = run_experiment(config)
    report = with_summary(frame)
    summary = report.iloc[-1]
    print(f"📊 {len(frame)} instances, max ratio {summary['ratio']} ({summary['ratio_decimal']})")

    if config.csv:
        write_csv(report, config.csv)
        print(f"📁 Wrote CSV report to {config.csv}")
    if config.jsonl:
        write_jsonl(report, config.jsonl)
        print(f"📁 Wrote JSON-lines report to {config.jsonl}")
    if config.db:
        # same source name as an ingest of the CSV, so re-ingesting replaces these rows
        source = Path(config.csv).name if config.csv else Path(args.config or "experiment").name
        rows = load_report(report, config.db, source_file=source)
        print(f"📁 Loaded {rows} rows into {config.db} ({DB_TABLE})")

    violations = bound_violations(report)
    if len(violations):
        for _, row in violations.iterrows():
            print(f"❌ {row['instance_id']}: ratio {row['ratio']} exceeds bound {row['bound']}")
        return EXIT_BOUND
    print("✅ Every ratio within its proven bound")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify-reduction


def _verify_3sat(args, cnf) -> int:
    artifacts = reduce_3sat_to_2mst(cnf, args.mode)
    instance = artifacts.instance
    assignment = next(satisfying_assignments(cnf), None)
    print(f"📊 {instance.n_pairs} pairs ({artifacts.mode} mode, lengths {artifacts.lengths})")
    status = EXIT_OK
    if assignment is None:
        print("📊 Formula is unsatisfiable")
    elif verify_forward_2mst(artifacts, assignment):
        print(f"✅ Forward check: assignment {[int(b) for b in assignment]} gives two weight-1 trees")
    else:
        print("❌ Forward check failed")
        status = EXIT_VALIDATION

    caps = _caps(args)
    if instance.n_pairs <= caps.mst_pairs:
        value = exact_opt(instance, StructureKind.SPANNING_TREE, Objective.BOTTLENECK, caps, args.jobs).best_value
        expected = 1 if assignment is not None else 2
        mark = "✅" if value == expected else "❌"
        print(f"{mark} Oracle bottleneck value {W.to_text(value)} (expected {expected})")
        if value != expected:
            status = EXIT_VALIDATION
    else:
        print(f"⚠️ Skipping oracle: {instance.n_pairs} pairs exceed cap {caps.mst_pairs}")
    return status


def _verify_1in3(args, cnf) -> int:
    artifacts = reduce_1in3_to_2matching(cnf)
    graph = artifacts.graph
    assignment = next(satisfying_assignments(cnf), None)
    print(f"📊 {graph.n_pairs} triples, {len(graph.unit_edges)} unit edges")
    status = EXIT_OK
    if assignment is None:
        print("📊 Formula has no 1-in-3 assignment")
    else:
        check = verify_forward_2matching(artifacts, assignment)
        mark = "✅" if check.ok else "❌"
        print(
            f"{mark} Forward cover: clause {set(check.edges_per_clause)}, "
            f"variable {set(check.edges_per_variable)}, connection {set(check.edges_per_connection)}"
        )
        published = check.published
        print(
            f"📊 Published per-gadget counts {published['clause']}/{published['variable']}/{published['connection']}, "
            f"counted minus published {check.published_gap() or 'none'}"
        )
        if not check.ok:
            status = EXIT_VALIDATION

    caps = _caps(args)
    if graph.n_real <= caps.c6_real_nodes:
        found = find_c6_cover(graph, caps.c6_real_nodes) is not None
        mark = "✅" if found == (assignment is not None) else "❌"
        print(f"{mark} C6 cover {'found' if found else 'absent'}")
        if found != (assignment is not None):
            status = EXIT_VALIDATION
    else:
        print(f"⚠️ Skipping cover search: {graph.n_real} real nodes exceed cap {caps.c6_real_nodes}")

    totals = hardness_accounting()
    print(
        f"📊 Accounting 16/6/12 on (15m, 8.4m): min-sum {W.to_decimal(totals['min_sum'], 1)}m, "
        f"min-max {W.to_decimal(totals['min_max'], 1)}m"
    )
    return status


def cmd_verify_reduction(args) -> int:
    flavor = Flavor(args.flavor)
    cnf = read_dimacs(args.cnf, flavor)
    print(f"🚀 Checking {flavor.value} reduction for {cnf.n_vars} variables, {cnf.n_clauses} clauses")
    print(f"📊 Satisfiable: {is_satisfiable(cnf)}")
    if flavor is Flavor.THREE_SAT:
        return _verify_3sat(args, cnf)
    return _verify_1in3(args, cnf)


# ---------------------------------------------------------------------------
# validate


def cmd_validate(args) -> int:
    instance = read_instance(args.instance)
    print(f"📊 {_describe(instance)}")
    status = EXIT_OK
    triangles = validate_metric(instance)
    if triangles:
        print(f"❌ {len(triangles)} triangle inequality violations, first {tuple(triangles[0])}")
        status = EXIT_VALIDATION
    else:
        print(f"✅ {instance.n_pairs}-pair instance is metric")
    if args.solution:
        problems = validate_solution(instance, read_solution(args.solution))
        for p in problems:
            print(f"❌ {p.rule}: {p.detail}")
        if problems:
            status = EXIT_VALIDATION
        else:
            print("✅ Solution is valid")
    return status


# ---------------------------------------------------------------------------


def _add_caps(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tsp-cap", type=int, help="largest class for exact TSP")
    parser.add_argument("--matching-cap", type=int, help="largest class for exact matching")
    parser.add_argument("--oracle-cap", type=int, help="largest pair count for the oracle")
    parser.add_argument("--c6-cap", type=int, help="largest real-node count for cover search")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="pairnet", description="Partitioned-pairs 2-structure toolkit")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    gen = sub.add_parser("gen", help="generate an instance")
    gen.add_argument("family", choices=FAMILIES)
    gen.add_argument("--out", required=True)
    gen.add_argument("--lambda", dest="lam", type=int, default=4)
    gen.add_argument("--eps", default="1/1024")
    gen.add_argument("--pairs", type=int, default=4)
    gen.add_argument("--cities", type=int, default=6)
    gen.add_argument("--base", help="instance-style JSON with a city weight matrix")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--model", choices=RANDOM_MODELS, default="weights12")
    gen.add_argument("--cnf", help="DIMACS formula for reductions")
    gen.add_argument("--mode", choices=[*MODES, *MODE_ALIASES], default="compact")
    gen.add_argument("--annotations", help="annotations output path")
    gen.add_argument("--dot", help="DOT output for the dummy graph")
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="solve an instance")
    solve.add_argument("--instance", required=True)
    solve.add_argument("--kind", choices=[k.value for k in StructureKind], required=True)
    solve.add_argument("--objective", choices=[o.value for o in Objective], required=True)
    solve.add_argument("--engine", choices=["approx", "oracle"], default="approx")
    solve.add_argument("--plan", help="TieBreakPlan JSON")
    solve.add_argument("--out")
    _add_caps(solve)
    solve.set_defaults(func=cmd_solve)

    exp = sub.add_parser("experiment", help="run a ratio experiment")
    exp.add_argument("--config")
    exp.add_argument("--kind", choices=[k.value for k in StructureKind])
    exp.add_argument("--objective", choices=[o.value for o in Objective])
    exp.add_argument("--csv")
    exp.add_argument("--jsonl")
    exp.add_argument("--db")
    _add_caps(exp)
    exp.set_defaults(func=cmd_experiment)

    ver = sub.add_parser("verify-reduction", help="check a hardness reduction on a formula")
    ver.add_argument("--cnf", required=True)
    ver.add_argument("--flavor", choices=[f.value for f in Flavor], default=Flavor.THREE_SAT.value)
    ver.add_argument("--mode", choices=[*MODES, *MODE_ALIASES], default="compact")
    _add_caps(ver)
    ver.set_defaults(func=cmd_verify_reduction)

    val = sub.add_parser("validate", help="validate an instance and optional solution")
    val.add_argument("--instance", required=True)
    val.add_argument("--solution")
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if getattr(args, "jobs", 1) is None and args.command != "experiment":
        args.jobs = 1
    try:
        return args.func(args)
    except UsageError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except PairnetError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, ValueError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

"""
Experiment runs and their reports.

An experiment turns an ExperimentConfig into one row per instance (algorithm
value, reference optimum, exact ratio, decomposition slacks) plus a summary
row, and writes the table as CSV, JSON lines and/or the DuckDB table the
SQL stage summarizes.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterator, Optional, Tuple

import duckdb
import pandas as pd

from pairnet import weights as W
from pairnet.approx import approximate, decomposition_report, theorem_bound
from pairnet.config import ExperimentConfig, SourceConfig, TieBreakPlan
from pairnet.errors import UnsupportedExperiment
from pairnet.generators import (
    gen_random_metric,
    lift_colocated,
    random_matrix,
    tight_mst_case,
    tight_tsp_case,
)
from pairnet.instance import MetricInstance, Objective, StructureKind, cost
from pairnet.oracle import exact_opt, exact_ratio

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [
    "instance_id",
    "family",
    "n_pairs",
    "kind",
    "objective",
    "reference",
    "alg",
    "opt",
    "ratio",
    "ratio_decimal",
    "bound",
    "within_bound",
    "slack_a",
    "slack_b",
    "slack_c",
    "slack_d",
]

DB_PATH = "pairnet.duckdb"
DB_TABLE = "experiment_raw"

# string-typed in DuckDB even when every value is empty
TEXT_COLUMNS = [c for c in REPORT_COLUMNS if c not in ("n_pairs", "bound", "within_bound")]


def iter_instances(source: SourceConfig) -> Iterator[Tuple[str, MetricInstance, Optional[TieBreakPlan], Optional[TieBreakPlan]]]:
    """(instance id, instance, algorithm plan, reference plan) per generated instance.

    The reference plan is set only for the tight families, whose optimum is
    measured by the favorable plan instead of the oracle.
    """
    if source.family == "random":
        for k in range(source.count):
            pairs = source.pairs[k % len(source.pairs)]
            seed = source.seed + k
            yield f"random-{source.model}-{pairs}p-s{seed}", gen_random_metric(pairs, seed, source.model), None, None
    elif source.family == "lift":
        if source.cities is not None:
            yield "lift-given", lift_colocated(source.cities), None, None
            return
        for k in range(source.count):
            cities = source.pairs[k % len(source.pairs)]
            seed = source.seed + k
            matrix, _ = random_matrix(cities, seed, source.model)
            yield f"lift-{source.model}-{cities}c-s{seed}", lift_colocated(matrix), None, None
    else:
        build = tight_mst_case if source.family == "tight-mst" else tight_tsp_case
        for lam in source.lambdas:
            case = build(lam, source.eps)
            alg_plan = case.adversarial if source.plan == "adversarial" else case.favorable
            yield f"{source.family}-l{lam}", case.instance, alg_plan, case.favorable


def _text(value) -> Optional[str]:
    return None if value is None else W.to_text(value)


def evaluate_instance(
    instance_id: str,
    instance: MetricInstance,
    config: ExperimentConfig,
    plan: Optional[TieBreakPlan],
    reference_plan: Optional[TieBreakPlan],
    oracle_jobs: int = 1,
) -> Dict[str, object]:
    kind, objective = config.kind, config.objective
    if objective is Objective.BOTTLENECK or kind is StructureKind.PERFECT_MATCHING:
        raise UnsupportedExperiment(f"no approximation algorithm for {kind.value}/{objective.value}")
    plan = plan or config.plan
    solution = approximate(instance, kind, plan)
    alg = cost(instance, solution, objective)
    if reference_plan is not None:
        opt = cost(instance, approximate(instance, kind, reference_plan), objective)
        reference = "favorable-plan"
    else:
        opt = exact_opt(instance, kind, objective, config.caps, oracle_jobs).best_value
        reference = "oracle"
    ratio = exact_ratio(alg, opt)
    bound = theorem_bound(kind, objective)
    slacks = decomposition_report(instance, solution.coloring)
    return {
        "instance_id": instance_id,
        "family": config.source.family,
        "n_pairs": instance.n_pairs,
        "kind": kind.value,
        "objective": objective.value,
        "reference": reference,
        "alg": W.to_text(alg),
        "opt": W.to_text(opt),
        "ratio": "inf" if ratio is None else W.to_text(ratio),
        "ratio_decimal": "inf" if ratio is None else W.to_decimal(ratio),
        "bound": bound,
        "within_bound": ratio is not None and (bound is None or ratio <= bound),
        "slack_a": _text(slacks.slack_a),
        "slack_b": _text(slacks.slack_b),
        "slack_c": _text(slacks.slack_c),
        "slack_d": _text(slacks.slack_d),
    }


def _evaluate_job(job) -> Dict[str, object]:
    return evaluate_instance(*job)


def run_experiment(config: ExperimentConfig) -> pd.DataFrame:
    """One row per instance in generation order."""
    work = [(iid, inst, config, plan, ref) for iid, inst, plan, ref in iter_instances(config.source)]
    if config.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(_evaluate_job, work))
    else:
        # a single instance still gets the sharded oracle
        rows = [evaluate_instance(*job, oracle_jobs=config.jobs) for job in work]
    logger.info("experiment %s/%s: %d instances", config.kind.value, config.objective.value, len(rows))
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def _min_text(values) -> Optional[str]:
    parsed = [W.as_weight(v) for v in values if isinstance(v, str)]
    return W.to_text(min(parsed)) if parsed else None


def summary_row(frame: pd.DataFrame) -> Dict[str, object]:
    """Max ratio and min slack over all rows."""
    ratios = [r for r in frame["ratio"] if r != "inf"]
    worst: Optional[Fraction] = max((Fraction(r) for r in ratios), default=None)
    has_inf = "inf" in set(frame["ratio"])
    return {
        "instance_id": "summary",
        "family": frame["family"].iloc[0] if len(frame) else None,
        "n_pairs": int(frame["n_pairs"].max()) if len(frame) else None,
        "kind": frame["kind"].iloc[0] if len(frame) else None,
        "objective": frame["objective"].iloc[0] if len(frame) else None,
        "reference": None,
        "alg": None,
        "opt": None,
        "ratio": "inf" if has_inf else _text(worst),
        "ratio_decimal": "inf" if has_inf else (None if worst is None else W.to_decimal(worst)),
        "bound": frame["bound"].iloc[0] if len(frame) else None,
        "within_bound": bool(frame["within_bound"].all()),
        "slack_a": _min_text(frame["slack_a"]),
        "slack_b": _min_text(frame["slack_b"]),
        "slack_c": _min_text(frame["slack_c"]),
        "slack_d": _min_text(frame["slack_d"]),
    }


def with_summary(frame: pd.DataFrame) -> pd.DataFrame:
    return pd.concat([frame, pd.DataFrame([summary_row(frame)], columns=REPORT_COLUMNS)], ignore_index=True)


def bound_violations(frame: pd.DataFrame) -> pd.DataFrame:
    rows = frame[frame["instance_id"] != "summary"]
    return rows[~rows["within_bound"].astype(bool)]


def write_csv(frame: pd.DataFrame, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)


def write_jsonl(frame: pd.DataFrame, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_json(path, orient="records", lines=True)


def _db_rows(frame: pd.DataFrame, source_file: str) -> pd.DataFrame:
    """Report rows typed for DuckDB, whether they came from a frame or a CSV file."""
    df = frame[frame["instance_id"] != "summary"].copy()
    # decimal ratios stay text in the report ("inf" for a zero optimum)
    ratio_value = pd.to_numeric(df["ratio_decimal"].astype(object), errors="coerce")
    df["n_pairs"] = pd.to_numeric(df["n_pairs"]).astype("Int64")
    df["bound"] = pd.to_numeric(df["bound"]).astype("Int64")
    df["within_bound"] = (df["within_bound"].astype(str) == "True").astype("boolean")
    for col in TEXT_COLUMNS:
        df[col] = df[col].astype("string")
    df["source_file"] = source_file
    df["ratio_value"] = ratio_value
    return df


def load_report(report, db_path=DB_PATH, table_name: str = DB_TABLE, con=None, source_file: Optional[str] = None) -> int:
    """Load one report (a CSV path or a frame) into DuckDB, dropping its summary row.

    Rows loaded earlier from the same source file are replaced.
    """
    if isinstance(report, pd.DataFrame):
        frame, source_file = report, source_file or "experiment"
    else:
        frame = pd.read_csv(report, dtype=str)
        source_file = source_file or Path(report).name
    df = _db_rows(frame, source_file)

    own = con is None
    con = con or duckdb.connect(str(db_path))
    try:
        con.register("temp_df", df)
        exists = con.execute(
            "SELECT COUNT(*) FROM information_schema.tables WHERE table_name = ?", [table_name]
        ).fetchone()[0]
        if exists:
            con.execute(f"DELETE FROM {table_name} WHERE source_file = ?", [source_file])
            con.execute(f"INSERT INTO {table_name} SELECT * FROM temp_df")
        else:
            con.execute(f"CREATE TABLE {table_name} AS SELECT * FROM temp_df")
        con.unregister("temp_df")
    finally:
        if own:
            con.close()
    logger.info("loaded %d rows from %s into %s", len(df), source_file, table_name)
    return len(df)

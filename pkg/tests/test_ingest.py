from pathlib import Path

import duckdb

from ingest.experiment_ingest import load_report
from pairnet.config import ExperimentConfig, SourceConfig
from pairnet.reports import run_experiment, with_summary, write_csv

SQL = Path(__file__).resolve().parents[1] / "transform" / "build_ratio_summary.sql"


def test_ingest_and_summarize(tmp_path):
    config = ExperimentConfig(kind="tsp", objective="min-sum", source=SourceConfig(count=3, pairs=[2]))
    report = tmp_path / "tsp.csv"
    write_csv(with_summary(run_experiment(config)), report)

    con = duckdb.connect(str(tmp_path / "ingest.duckdb"))
    try:
        assert load_report(report, con=con) == 3
        # reloading the same file replaces its rows
        assert load_report(report, con=con) == 3
        assert con.execute("SELECT COUNT(*) FROM experiment_raw").fetchone()[0] == 3

        con.execute(SQL.read_text())
        family, instances, all_within = con.execute(
            "SELECT family, instances, all_within_bound FROM ratio_summary"
        ).fetchone()
        assert (family, instances, all_within) == ("random", 3, True)
        assert con.execute("SELECT COUNT(*) FROM bound_violations").fetchone()[0] == 0
    finally:
        con.close()

import sys
from pathlib import Path

from pairnet import reports

# Connect to DuckDB
DB_PATH = reports.DB_PATH


def load_report(csv_path, table_name=reports.DB_TABLE, con=None):
    """Load one experiment CSV report, dropping its summary row"""
    # Summary rows are recomputed by the SQL stage
    rows = reports.load_report(csv_path, DB_PATH, table_name, con=con)
    print(f"✅ Loaded {Path(csv_path).name} into {table_name} with {rows} rows")
    return rows


if __name__ == "__main__":
    reports_found = sys.argv[1:] or sorted(str(p) for p in Path("data_demo/reports").glob("*.csv"))
    if not reports_found:
        print("❌ No experiment reports found under data_demo/reports")
        sys.exit(1)
    for path in reports_found:
        load_report(path)
    print("✅ Experiment reports loaded into DuckDB")

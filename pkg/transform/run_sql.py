import sys

import duckdb

DB_PATH = sys.argv[1] if len(sys.argv) > 1 else "pairnet.duckdb"

con = duckdb.connect(DB_PATH)

with open("transform/build_ratio_summary.sql", "r") as f:
    sql = f.read()

con.execute(sql)

violations = con.execute("SELECT COUNT(*) FROM bound_violations").fetchone()[0]
for family, kind, objective, instances, max_ratio in con.execute(
    "SELECT family, kind, objective, instances, max_ratio FROM ratio_summary"
).fetchall():
    shown = "inf" if max_ratio is None else f"{max_ratio:.6f}"
    print(f"📊 {family} {kind}/{objective}: {instances} instances, max ratio {shown}")
con.close()

if violations:
    print(f"❌ {violations} rows exceed their bound")
    sys.exit(3)
print("✅ Ran SQL transform via Python")

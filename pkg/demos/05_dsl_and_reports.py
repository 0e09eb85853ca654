"""Describing a system in the text language and running its queries.

Run: python demos/05_dsl_and_reports.py
"""

from nadsys import DSLError, parse, run, to_csv, to_json

SOURCE = """
map tent = pl [(0,0),(1/2,1),(1,0)]
map lift = pl [(0,1/2),(1/2,1/2),(1,1)]   # flat on the left half
seq S    = eventually [lift] then tent
set U    = (0,1/3)
set V    = (2/3,3/4)
query hitset S U V horizon=12
query compose tent tent tent
"""

spec = parse(SOURCE)
reports = run(spec)
print(to_json(reports)[:600], "...\n")
print(to_csv(reports))

BROKEN = """
map bad = pl [(0,0),(1/2,3/2),(1,1)]
map worse = pl [(0,0),(0.5,1),(1,1)]
seq S = cycle [missing]
"""
try:
    parse(BROKEN)
except DSLError as e:
    print("diagnostics:")
    for d in e.diagnostics:
        print("  ", d)

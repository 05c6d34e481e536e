"""
Verification suites
===================

Every identity and differential system the library knows is checked
point-wise with its own budget. A summary per suite is printed here; the CLI
``ellipticore verify`` prints the full rows.
"""

from collections import defaultdict

from ellipticore.suites import SUITES, run_suite

for name in SUITES:
    rows = run_suite(name)
    worst = defaultdict(float)
    for r in rows:
        if r.residual is not None:
            worst[r.check] = max(worst[r.check], r.residual)
    status = "ok" if all(r.passed for r in rows) else "FAILED"
    print(f"{name:12s} {len(rows):4d} rows  {status}")
    for check, w in sorted(worst.items()):
        print(f"    {check:18s} worst {w:.1e}")

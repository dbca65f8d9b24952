"""How the AQFT success bound compares with the exact value and the older bound.

With m = ceil(log2 n) + 2 the bound 4/pi^2 cos^2(pi 2^-m)^(n-m) stays above
4/pi^2 - 1/(4n), while the older 8/pi^2 sin^2(pi m / 4n) collapses.
"""

from aqftlab import bounds_report, log_rule
from aqftlab.experiments import Dyadic, LogRule, SweepConfig, WorstCase, sweep_exact

print("    n   m   aqft     fixed    older")
for n in (4, 16, 64, 256, 1024, 4096):
    r = bounds_report(n, log_rule(n))
    print(f"{n:5d} {r.m:3d}   {r.aqft_bound:.4f}   {r.fixed_bound_n:.4f}   {r.barenco_bound:.2e}")

res = sweep_exact(SweepConfig((8, 16, 32), LogRule(2), (Dyadic(1025), WorstCase())))
s = res.summary
print(f"\nexact sweep: {s.rows} phases, lowest P {s.min_p:.5f} at n={s.argmin_n}, "
      f"{s.violations} bound violations")
for n in (8, 16, 32):
    rows = [r for r in res.rows if r.n == n]
    worst = min(rows, key=lambda r: r.margin)
    print(f"  n={n}: tightest margin {worst.margin:.5f} at phi={worst.phi.dyadic_str()}")

"""
Step schedules and the lower bounds they certify
================================================

Every hard instance starts from two sequences gamma and delta. Here we build
the four built-in schedules and compare the bounds they produce.
"""

import numpy as np

from zerochain import make_class, risk_bound, xrisk_bound
from zerochain.sequences import (
    closed_form_bounds,
    recursion_slack,
    schedule_exact_muzero,
    schedule_exact_sc,
    schedule_simple_muzero,
    schedule_simple_sc,
    theta_sequence,
)

# Without strong convexity, the exact schedule beats the simple one at every horizon.
p0 = make_class(0.0, 1.0, 1.0)
print(" N   simple       exact        L R^2 / (2 theta_N^2)")
for N in (1, 2, 5, 10, 20):
    simple = risk_bound(schedule_simple_muzero(N, p0))
    exact = risk_bound(schedule_exact_muzero(N, p0))
    theta = theta_sequence(N).values[-1]
    print(f"{N:2d}   {simple:.6e}  {exact:.6e}  {0.5 / theta**2:.6e}")

# The exact schedule uses its recursion with no slack; the simple one has room to spare.
print("\nrecursion slack, N=5")
print("  simple:", np.array2string(recursion_slack(schedule_simple_muzero(5, p0)), precision=3))
print("  exact: ", np.array2string(recursion_slack(schedule_exact_muzero(5, p0)), precision=3))

# With mu > 0 both schedules also bound the distance to the minimizer.
print("\n q     N   simple dist   exact dist   weakened estimate")
for q in (0.01, 0.1, 0.5):
    p = make_class(q, 1.0, 1.0)
    for N in (1, 5, 15):
        s = xrisk_bound(schedule_simple_sc(N, p))
        e = xrisk_bound(schedule_exact_sc(N, p))
        w = closed_form_bounds(p, N).xrisk_weak
        print(f"{q:<5} {N:3d}   {s:.5e}   {e:.5e}   {w:.5e}")

# The max-form value bound takes the larger of a geometric term and the
# mu = 0 exact term. The geometric term never wins, though it comes close
# for q near 1 at N = 0.
print("\nmax-form value bound: geometric branch / convex branch")
for q in (0.1, 0.5, 0.9, 0.999):
    p = make_class(q, 1.0, 1.0)
    s = np.sqrt(q)
    ratios = []
    for N in (0, 1, 5, 20):
        geometric = q * (2 - s) / (1 + s) * (1 - s) ** (2 * N)
        convex = 0.5 / theta_sequence(N).values[-1] ** 2
        ratios.append(geometric / convex)
    print(f"  q={q:<6}", "  ".join(f"{r:.3e}" for r in ratios), f"  -> {closed_form_bounds(p, 0).risk_strong_branch}")

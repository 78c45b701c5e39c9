"""
Gradient descent between the lower bound and its classical rate
===============================================================

On a hard instance, any method that only moves within the span of past
gradients cannot get closer to the minimizer than the certified bound. Gradient
descent with step 2/(L + mu) is such a method, and its known rate caps it from
above.
"""

import numpy as np

from zerochain import audit_zero_respecting, build_hard_instance, make_class, run_gradient_descent
from zerochain import schedule_exact_sc, xrisk_bound
from zerochain.methods import gd_rate, run_method

q, N = 0.1, 10
params = make_class(q, 1.0, 1.0)
h = build_hard_instance(schedule_exact_sc(N, params))
oracle = h.oracle()

t = run_gradient_descent(oracle, N)
print(" k   distance      upper rate")
for k, x in enumerate(t.points):
    print(f"{k:2d}   {np.linalg.norm(x - h.x_star):.6f}    {gd_rate(params, k):.6f}")
print(f"certified lower bound at N={N}: {xrisk_bound(h.schedule):.6f}")
print(audit_zero_respecting(t, h).format())

# A method that peeks outside the gradient span is flagged by the audit.
rng = np.random.default_rng(1)


def cheating(k, points, responses):
    if k == N - 1:
        return h.x_star + 1e-3 * rng.standard_normal(h.dim)
    return points[-1] - 2 / (params.L + params.mu) * responses[-1].gradient


c = run_method(oracle, N, cheating, name="cheating")
print(f"\ncheating method final distance: {np.linalg.norm(c.final - h.x_star):.2e}")
print(audit_zero_respecting(c, h).format())

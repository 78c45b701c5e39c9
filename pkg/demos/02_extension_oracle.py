"""
An exact oracle from a handful of triplets
==========================================

A finite set of (point, gradient, value) triplets is turned into a smooth
strongly convex function on all of R^d. Each query solves a small concave
quadratic program over the simplex.
"""

import numpy as np

from zerochain import ExtensionOracle, TripletSet, check_interpolation_conditions, eval_oracle, make_class
from zerochain.audit import oracle_audit

# Two one-dimensional triplets that agree with f(x) = (x - 1)^2 / 2.
T = TripletSet.from_arrays([[0.0], [2.0]], [[-1.0], [1.0]], [0.5, 0.5])
params = make_class(0.0, 1.0)
print(check_interpolation_conditions(T, params).format())

oracle = ExtensionOracle(T, params)
for y in (-1.0, 0.0, 0.5, 1.0, 2.0, 3.0):
    r = eval_oracle(oracle, [y])
    print(f"y={y:+.1f}  V={r.value:.6f}  grad={r.gradient[0]:+.6f}  alpha={np.round(r.alpha, 4)}")

# Random data need not come from any function, yet the extension still
# lies in the class: the sampled audit confirms it.
rng = np.random.default_rng(0)
R = TripletSet.from_arrays(rng.standard_normal((8, 3)), rng.standard_normal((8, 3)), rng.standard_normal(8))
print()
print(check_interpolation_conditions(R, make_class(0.2, 1.0)).format())
print(oracle_audit(ExtensionOracle(R, make_class(0.2, 1.0)), points=50, seed=0).format())

"""Sampled soundness checks of an extension oracle.

These complement the exact condition checks: finite-difference gradients,
the curvature sandwich ``mu <= curvature <= L`` along random chords,
interpolability of the oracle's own outputs, and the optimality certificate
of each returned weight vector.
"""

from __future__ import annotations

import numpy as np

from .extension import (
    ExtensionOracle,
    check_interpolation_conditions,
    eval_oracle,
    finite_difference_gradient,
    kkt_violation,
)
from .model import EQ_ABS, EQ_REL, TripletSet, ValidationReport

FD_RTOL = 1e-5
CURVATURE_TOL = 1e-9
SELF_INTERP_TOL = 1e-8


def sample_points(oracle: ExtensionOracle, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on the bounding box of the data, widened by ``R_x``."""
    X = oracle.triplets.X
    R = oracle.params.R_x
    lo = X.min(axis=0) - R
    hi = X.max(axis=0) + R
    return rng.uniform(lo, hi, size=(n, oracle.dim))


def gradient_errors(oracle: ExtensionOracle, points: np.ndarray) -> np.ndarray:
    """Relative error between central differences and the oracle gradient."""
    out = np.empty(len(points))
    for k, y in enumerate(points):
        g = eval_oracle(oracle, y).gradient
        fd = finite_difference_gradient(oracle, y)
        out[k] = np.linalg.norm(fd - g) / max(float(np.linalg.norm(g)), 1e-12)
    return out


def curvature_gaps(oracle: ExtensionOracle, pairs: np.ndarray, ts: np.ndarray) -> tuple[float, float]:
    """Worst violation of convexity of ``V - mu/2 |.|^2`` and of ``L/2 |.|^2 - V``
    along the chords ``(a, b)`` at the given interior weights."""
    mu, L = oracle.params.mu, oracle.params.L
    lo_worst = hi_worst = -np.inf
    for (a, b), t in zip(pairs, ts):
        m = t * a + (1 - t) * b
        va, vb, vm = (eval_oracle(oracle, p).value for p in (a, b, m))
        sq = lambda p: float(p @ p)  # noqa: E731
        # chord of phi above phi(m) for convex phi
        for c, sign, worst in ((mu, 1.0, "lo"), (L, -1.0, "hi")):
            pa = sign * (va - 0.5 * c * sq(a))
            pb = sign * (vb - 0.5 * c * sq(b))
            pm = sign * (vm - 0.5 * c * sq(m))
            gap = pm - (t * pa + (1 - t) * pb)
            gap /= 1.0 + abs(pa) + abs(pb)
            if worst == "lo":
                lo_worst = max(lo_worst, gap)
            else:
                hi_worst = max(hi_worst, gap)
    return float(lo_worst), float(hi_worst)


def oracle_samples(oracle: ExtensionOracle, points: np.ndarray) -> TripletSet:
    """The oracle's own outputs as a triplet set."""
    X, G, F = [], [], []
    for y in points:
        r = eval_oracle(oracle, y)
        X.append(y)
        G.append(r.gradient)
        F.append(r.value)
    return TripletSet.from_arrays(X, G, F)


def oracle_audit(oracle: ExtensionOracle, points: int = 100, seed: int = 0,
                 interp_samples: int = 50, pairs: int = 50) -> ValidationReport:
    rng = np.random.default_rng(seed)
    rep = ValidationReport("oracle audit")
    P = sample_points(oracle, points, rng)
    err = gradient_errors(oracle, P)
    rep.add("fd_gradient", err.max() <= FD_RTOL, float(err.max()), f"{points} points")

    worst_kkt = 0.0
    for y in P:
        r = eval_oracle(oracle, y)
        scale = 1.0 + abs(r.value)
        worst_kkt = max(worst_kkt, kkt_violation(oracle, y, r.alpha) / scale)
    rep.add("kkt", worst_kkt <= EQ_ABS + EQ_REL, worst_kkt, "simplex optimality of returned weights")

    S = oracle_samples(oracle, sample_points(oracle, interp_samples, rng))
    sub = check_interpolation_conditions(S, oracle.params, tol=SELF_INTERP_TOL)
    c = sub.checks[0]
    rep.add("self_interpolation", c.passed, c.residual, c.detail)

    AB = sample_points(oracle, 2 * pairs, rng).reshape(pairs, 2, oracle.dim)
    ts = rng.uniform(0, 1, size=pairs)
    lo, hi = curvature_gaps(oracle, AB, ts)
    rep.add("strong_convexity", lo <= CURVATURE_TOL, lo, "V - mu/2|.|^2 midpoint-convex")
    rep.add("smoothness", hi <= CURVATURE_TOL, hi, "L/2|.|^2 - V midpoint-convex")
    return rep

"""First-order method runners against an extension oracle.

Only gradient descent is built in. Other methods plug in through
:func:`run_method` with an update rule that sees the trajectory so far.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .extension import ExtensionOracle, eval_oracle
from .instance import HardInstance, projection_residual, span_basis
from .model import OracleResponse, ValidationReport
from .sequences import risk_bound, xrisk_bound

DIVERGENCE_FACTOR = 1e6
SPAN_TOL = 1e-8


class DivergenceError(RuntimeError):
    def __init__(self, k: int, norm: float):
        super().__init__(f"iterate {k} diverged (|x_k| = {norm:.3e})")
        self.k = k
        self.norm = norm


@dataclass
class Trajectory:
    points: list[np.ndarray] = field(default_factory=list)
    responses: list[OracleResponse] = field(default_factory=list)
    method_name: str = ""

    def __len__(self):
        return len(self.points)

    @property
    def final(self) -> np.ndarray:
        return self.points[-1]


UpdateRule = Callable[[int, Sequence[np.ndarray], Sequence[OracleResponse]], np.ndarray]


def run_method(oracle: ExtensionOracle, steps: int, update: UpdateRule, name: str = "custom",
               x0: np.ndarray | None = None) -> Trajectory:
    """Query at ``x_0`` (zero by default), then ``steps`` more times at
    ``update(k, points, responses)``; the last point is the output."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    bound = DIVERGENCE_FACTOR * oracle.params.R_x
    x = np.zeros(oracle.dim) if x0 is None else np.asarray(x0, dtype=float).copy()
    traj = Trajectory(method_name=name)
    for k in range(steps + 1):
        norm = float(np.linalg.norm(x))
        if not np.all(np.isfinite(x)) or norm > bound:
            raise DivergenceError(k, norm)
        traj.points.append(x)
        traj.responses.append(eval_oracle(oracle, x))
        if k < steps:
            x = np.asarray(update(k, traj.points, traj.responses), dtype=float)
    return traj


def run_gradient_descent(oracle: ExtensionOracle, steps: int, step_size: float | None = None) -> Trajectory:
    """Fixed-step gradient descent from zero; default step ``2/(L + mu)``."""
    p = oracle.params
    h = 2.0 / (p.L + p.mu) if step_size is None else float(step_size)
    if not h > 0:
        raise ValueError("step_size must be positive")

    def update(k, points, responses):
        return points[-1] - h * responses[-1].gradient

    return run_method(oracle, steps, update, name="gd")


def audit_zero_respecting(t: Trajectory, h: HardInstance, tol: float = SPAN_TOL) -> ValidationReport:
    """Each ``x_k`` must lie in the span of ``grad_i - mu x_i`` for ``i < k``."""
    rep = ValidationReport(f"zero-respecting audit ({t.method_name})")
    mu = h.params.mu
    worst, where = 0.0, None
    for k, x in enumerate(t.points):
        prev = np.array([r.gradient - mu * p for p, r in zip(t.points[:k], t.responses[:k])])
        B = span_basis(prev.reshape(k, -1) if k else np.zeros((0, x.size)))
        res = float(np.linalg.norm(projection_residual(x, B))) / (1.0 + float(np.linalg.norm(x)))
        if res > worst:
            worst, where = res, k
    detail = "all iterates in span" if where is None or worst <= tol else f"first worst at k={where}"
    rep.add("zero_respecting", worst <= tol, worst, detail)
    return rep


@dataclass(frozen=True)
class BoundScore:
    distance: float
    value_gap: float
    xrisk_bound: float | None
    risk_bound: float
    distance_ratio: float | None
    value_ratio: float

    @property
    def bounds_hold(self) -> bool:
        ok = self.value_ratio >= 1 - 1e-9
        if self.distance_ratio is not None:
            ok = ok and self.distance_ratio >= 1 - 1e-9
        return ok


def score_against_bounds(t: Trajectory, h: HardInstance, oracle: ExtensionOracle | None = None) -> BoundScore:
    """Final distance to ``x_*`` and value gap, next to the certified bounds."""
    oracle = h.oracle() if oracle is None else oracle
    x = t.final
    dist = float(np.linalg.norm(x - h.x_star))
    gap = eval_oracle(oracle, x).value - float(h.triplets.star.f)
    rb = risk_bound(h.schedule)
    if h.params.mu > 0:
        xb = xrisk_bound(h.schedule)
        dr = dist / xb if xb > 0 else np.inf
    else:
        xb, dr = None, None
    vr = gap / rb if rb > 0 else np.inf
    return BoundScore(dist, gap, xb, rb, dr, vr)


def gd_rate(params, k: int) -> float:
    """Classical distance contraction ``((1-q)/(1+q))^k`` for step ``2/(L+mu)``."""
    q = params.q
    return ((1 - q) / (1 + q)) ** k

"""Step schedules for the lower-bound construction and the bounds they give.

A schedule is a pair of sequences ``gamma_0..gamma_N`` and ``delta_0..delta_N``.
When it satisfies

    0 <= q*delta_i <= gamma_i <= delta_i,
    gamma_{i+1}*delta_{i+1} <= -(gamma_i - delta_i)*(gamma_i - q*delta_i),
    sum(delta**2) <= R_x**2,

with ``q = mu/L``, a hard instance can be built from it (see
:mod:`zerochain.instance`) and after ``N`` oracle calls no method beats

    risk  = L**2/(2(L-mu)) * (2 gamma_N delta_N - gamma_N**2 - q delta_N**2)
    xrisk = delta_N            (mu > 0 only)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import INEQ_TOL, ClassParams, Schedule, ScheduleKind, ValidationReport

# rounding band for provably nonnegative radicands
RADICAND_BAND = 1e-15


def _sqrt_nonneg(v: float, what: str) -> float:
    if v < 0:
        if v < -RADICAND_BAND:
            raise ArithmeticError(f"negative radicand {v!r} in {what}")
        v = 0.0
    return math.sqrt(v)


def _check_N(N: int) -> int:
    if int(N) != N or N < 0:
        raise ValueError(f"N must be a nonnegative integer, got {N!r}")
    return int(N)


@dataclass(frozen=True)
class ThetaSequence:
    values: np.ndarray
    terminal_rule_applied: bool

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class LambdaSequence:
    values: np.ndarray
    q: float

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return self.values.size


def theta_sequence(N: int) -> ThetaSequence:
    """``theta_0 = 1``, then ``(1 + sqrt(1 + 4 theta^2))/2`` for the interior
    and ``(1 + sqrt(1 + 8 theta^2))/2`` for the last entry.

    For ``N = 0`` the sequence is just ``[1]``.
    """
    N = _check_N(N)
    th = [1.0]
    for i in range(1, N + 1):
        c = 8.0 if i == N else 4.0
        th.append((1.0 + math.sqrt(1.0 + c * th[-1] ** 2)) / 2.0)
    values = np.array(th)
    values.setflags(write=False)
    return ThetaSequence(values, terminal_rule_applied=N >= 1)


def lambda_sequence(N: int, q: float) -> LambdaSequence:
    """``lambda_0 = sqrt(q)``, ``lambda_{i+1} = (1 - sqrt(q - (1-q) lambda_i^2)) / (1 + lambda_i^2) * lambda_i``."""
    N = _check_N(N)
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    lam = [math.sqrt(q)]
    for _ in range(N):
        li = lam[-1]
        r = _sqrt_nonneg(q - (1 - q) * li * li, "lambda recursion")
        lam.append((1 - r) / (1 + li * li) * li)
    values = np.array(lam)
    values.setflags(write=False)
    return LambdaSequence(values, q)


def _require_mu_zero(params: ClassParams):
    if params.mu != 0:
        raise ValueError(f"this schedule needs mu = 0, got mu = {params.mu}")


def _require_mu_positive(params: ClassParams):
    if not params.mu > 0:
        raise ValueError(f"this schedule needs mu > 0, got mu = {params.mu}")


def schedule_simple_muzero(N: int, params: ClassParams) -> Schedule:
    N = _check_N(N)
    _require_mu_zero(params)
    R = params.R_x
    i = np.arange(N + 1)
    gamma = R / (2 * (i + 1) * math.sqrt(N + 1))
    delta = np.full(N + 1, R / math.sqrt(N + 1))
    return Schedule(gamma, delta, params, ScheduleKind.SIMPLE_MUZERO)


def zeta_sequence(N: int, R_x: float = 1.0) -> np.ndarray:
    """Backward auxiliary sequence ``zeta_0..zeta_{N+2}`` (last entry is 0)."""
    N = _check_N(N)
    th = theta_sequence(N).values
    tN = th[N]
    z = np.zeros(N + 3)
    R2 = R_x * R_x
    z[N + 1] = (tN - 1) / (tN * tN * (2 * tN - 1)) * R2
    # same as tN/(tN-1) * z[N+1], but defined at tN = 1 (N = 0)
    z[N] = R2 / (tN * (2 * tN - 1))
    for i in range(N - 1, -1, -1):
        z[i] = 2 * th[i] / (2 * th[i] - 1) * z[i + 1]
    return z


def schedule_exact_muzero(N: int, params: ClassParams) -> Schedule:
    N = _check_N(N)
    _require_mu_zero(params)
    z = zeta_sequence(N, params.R_x)
    diff = z[: N + 1] - z[1 : N + 2]
    gamma = np.sqrt(diff)
    delta = z[: N + 1] / gamma
    return Schedule(gamma, delta, params, ScheduleKind.EXACT_MUZERO)


def schedule_simple_sc(N: int, params: ClassParams) -> Schedule:
    N = _check_N(N)
    _require_mu_positive(params)
    s = math.sqrt(params.q)
    c = math.sqrt(1 - (1 - s) ** 2)
    delta = c * (1 - s) ** np.arange(N + 1) * params.R_x
    gamma = s * delta
    return Schedule(gamma, delta, params, ScheduleKind.SIMPLE_SC)


def schedule_exact_sc(N: int, params: ClassParams) -> Schedule:
    """Grow the schedule one entry at a time, keeping ``sum(delta^2) = R_x^2``
    and the recursion tight, so that ``delta_N = lambda_N R_x / sqrt(q)``."""
    N = _check_N(N)
    _require_mu_positive(params)
    q = params.q
    sq = math.sqrt(q)
    lam = lambda_sequence(N, q).values
    gamma = [q]
    delta = [1.0]
    for n in range(N):
        ln, ln1 = lam[n], lam[n + 1]
        r = _sqrt_nonneg(q - (1 - q) * ln * ln, "exact schedule step")
        head = q - ln1 * ln1
        if head < -RADICAND_BAND:
            raise ArithmeticError(f"negative radicand {head!r} in exact schedule step")
        head = max(head, 0.0)
        scale = math.sqrt(math.sqrt(head / (r * r)))
        gamma = [scale * g for g in gamma[:n]]
        delta = [scale * d for d in delta[:n]]
        gamma.append(math.sqrt(q * ln * ln / r))
        delta.append(math.sqrt(ln * ln * head / (q * r)))
        gamma.append(sq * ln1)
        delta.append(ln1 / sq)
    R = params.R_x
    return Schedule(np.array(gamma) * R, np.array(delta) * R, params, ScheduleKind.EXACT_SC)


SCHEDULE_BUILDERS = {
    ScheduleKind.SIMPLE_MUZERO: schedule_simple_muzero,
    ScheduleKind.EXACT_MUZERO: schedule_exact_muzero,
    ScheduleKind.SIMPLE_SC: schedule_simple_sc,
    ScheduleKind.EXACT_SC: schedule_exact_sc,
}


def build_schedule(kind: ScheduleKind | str, N: int, params: ClassParams) -> Schedule:
    kind = ScheduleKind(kind)
    if kind not in SCHEDULE_BUILDERS:
        raise ValueError(f"no builder for schedule kind {kind.value!r}")
    return SCHEDULE_BUILDERS[kind](N, params)


def default_schedule(variant: str, N: int, params: ClassParams) -> Schedule:
    """Pick the simple or exact schedule appropriate for ``params.mu``."""
    if variant not in ("simple", "exact"):
        raise ValueError(f"variant must be 'simple' or 'exact', got {variant!r}")
    if params.mu == 0:
        kind = ScheduleKind.SIMPLE_MUZERO if variant == "simple" else ScheduleKind.EXACT_MUZERO
    elif params.mu > 0:
        kind = ScheduleKind.SIMPLE_SC if variant == "simple" else ScheduleKind.EXACT_SC
    else:
        raise ValueError("schedules require mu >= 0")
    return build_schedule(kind, N, params)


def recursion_slack(s: Schedule) -> np.ndarray:
    """``-(gamma_i - delta_i)(gamma_i - q delta_i) - gamma_{i+1} delta_{i+1}`` for ``i < N``.

    Nonnegative for a valid schedule, zero where the recursion is tight.
    """
    g, d, q = s.gamma, s.delta, s.params.q
    return -(g[:-1] - d[:-1]) * (g[:-1] - q * d[:-1]) - g[1:] * d[1:]


def recursion_rel_gap(s: Schedule) -> np.ndarray:
    """Relative departure from equality in the recursion, per ``i < N``."""
    g, d, q = s.gamma, s.delta, s.params.q
    rhs = -(g[:-1] - d[:-1]) * (g[:-1] - q * d[:-1])
    lhs = g[1:] * d[1:]
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    scale[scale == 0] = 1.0
    return np.abs(lhs - rhs) / scale


def validate_schedule(s: Schedule, tol: float = INEQ_TOL) -> ValidationReport:
    """Check the ordering, recursion and radius hypotheses. Residuals are the
    worst violation (positive means violated)."""
    rep = ValidationReport(f"schedule {s.kind.value} N={s.N}")
    g, d, q = s.gamma, s.delta, s.params.q
    R2 = s.params.R_x ** 2
    scale = max(1.0, s.params.R_x)
    order = np.concatenate([-(q * d), q * d - g, g - d])
    worst = float(order.max())
    rep.add("nonneg", worst <= tol * scale, worst, "0 <= q delta_i <= gamma_i <= delta_i")
    if s.N >= 1:
        worst = float(-recursion_slack(s).min())
        rep.add("recursion", worst <= tol * scale ** 2, worst,
                "gamma_{i+1} delta_{i+1} <= -(gamma_i - delta_i)(gamma_i - q delta_i)")
    else:
        rep.skip("recursion", "N = 0")
    worst = float(np.sum(d * d) - R2)
    rep.add("radius", worst <= tol * scale ** 2, worst, "sum delta^2 <= R_x^2")
    return rep


def _require_valid(s: Schedule):
    rep = validate_schedule(s)
    if not rep.passed:
        names = ", ".join(c.name for c in rep.failures())
        raise ValueError(f"schedule fails: {names}")


def risk_value(s: Schedule) -> float:
    """Function-value bound for a schedule, without validating it."""
    L, mu, q = s.params.L, s.params.mu, s.params.q
    g, d = s.gamma[-1], s.delta[-1]
    return L * L / (2 * (L - mu)) * (2 * g * d - g * g - q * d * d)


def risk_bound(s: Schedule) -> float:
    """Lower bound on the worst-case ``f(x_N) - f*`` over the class."""
    _require_valid(s)
    return float(risk_value(s))


def xrisk_bound(s: Schedule) -> float:
    """Lower bound on the worst-case distance to the minimizer (mu > 0)."""
    if not s.params.mu > 0:
        raise ValueError("the distance bound needs mu > 0")
    _require_valid(s)
    return float(s.delta[-1])


@dataclass(frozen=True)
class ClosedFormBounds:
    """Closed-form bounds for a class and horizon ``N``; ``None`` where undefined."""

    risk_strong: float
    risk_weak: float
    risk_strong_branch: str
    xrisk_strong: float | None
    xrisk_weak: float | None


def closed_form_bounds(params: ClassParams, N: int) -> ClosedFormBounds:
    """The max-form risk bound (strong and weakened), and for ``mu > 0`` the
    exact distance bound and its geometric lower estimate."""
    N = _check_N(N)
    q, L, R = params.q, params.L, params.R_x
    if q < 0:
        raise ValueError("closed-form bounds need mu >= 0")
    s = math.sqrt(q)
    theta_N = theta_sequence(N).values[-1]
    sc = 2 * q * (2 - s) / (1 + s) * (1 - s) ** (2 * N)
    cv = 1 / theta_N ** 2
    risk_strong = max(sc, cv) * L * R * R / 2
    branch = "strongly_convex" if sc > cv else "convex"
    risk_weak = max(q * (1 - s) ** (2 * N), 3 / (4 * (N + 1) ** 2)) * L * R * R / 2
    if q > 0:
        lam = lambda_sequence(N, q).values[-1]
        xs = lam * R / s
        xw = q ** 0.25 * (1 - s) ** N * R
    else:
        xs = xw = None
    return ClosedFormBounds(risk_strong, risk_weak, branch, xs, xw)

"""Hard triplet sets built from a schedule, and their certificates.

For a schedule ``(gamma, delta)`` the triplets live in ``R^(N+1)`` with unit
vectors ``e_0..e_N``::

    x_j = -sum_{t<j} delta_t e_t        g_j = L gamma_j e_j
    f_j = L^2/(2(L-mu)) (2 gamma_j delta_j - gamma_j^2 - q sum_{t>=j} delta_t^2)
    x_* = -sum_{t<=N} delta_t e_t       g_* = 0,  f_* = 0

The extension of this set is a zero-chain on ``w_0..w_{N-1}``
(``w_i = g_i - mu x_i``), its minimizer is ``x_*``, and over the span of the
chain its value never drops below ``f_N`` and its distance to ``x_*`` never
drops below ``delta_N``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .extension import (
    ExtensionOracle,
    check_interpolation_conditions,
    eval_oracle,
    interpolation_violations,
)
from .model import (
    EQ_ABS,
    EQ_REL,
    INEQ_TOL,
    STAR,
    ClassParams,
    Schedule,
    Triplet,
    TripletSet,
    ValidationReport,
)
from .sequences import validate_schedule

RANK_RTOL = 1e-12
TIE_TOL = 1e-12


@dataclass(frozen=True)
class HardInstance:
    triplets: TripletSet
    schedule: Schedule

    @property
    def params(self) -> ClassParams:
        return self.schedule.params

    @property
    def N(self) -> int:
        return self.triplets.N

    @property
    def dim(self) -> int:
        return self.triplets.dim

    @property
    def W(self) -> np.ndarray:
        """Rows ``w_i = g_i - mu x_i`` in label order (star last)."""
        return self.triplets.G - self.params.mu * self.triplets.X

    @property
    def x_star(self) -> np.ndarray:
        return self.triplets.star.x

    def oracle(self) -> ExtensionOracle:
        return ExtensionOracle(self.triplets, self.params)

    def chain_basis(self, j: int) -> np.ndarray:
        """Orthonormal basis (columns) of ``span{w_0, .., w_{j-1}}``."""
        return span_basis(self.W[:j])

    def padded(self, dim: int) -> "HardInstance":
        return HardInstance(self.triplets.padded(dim), self.schedule)


def span_basis(vectors: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the row span of `vectors`."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.shape[0] == 0:
        return np.zeros((vectors.shape[1], 0))
    U, s, _ = np.linalg.svd(vectors.T, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((vectors.shape[1], 0))
    return U[:, s > rtol * s[0]]


def projection_residual(v: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return v - basis @ (basis.T @ v)


def _rank(A: np.ndarray, rtol: float = RANK_RTOL) -> int:
    if A.shape[0] == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def build_triplets(s: Schedule, dim: int | None = None) -> TripletSet:
    mu, L = s.params.mu, s.params.L
    q = s.params.q
    N = s.N
    d = N + 1 if dim is None else int(dim)
    if d < N + 1:
        raise ValueError(f"dimension must be at least N+1 = {N + 1}")
    g, dl = s.gamma, s.delta
    tail = np.cumsum((dl * dl)[::-1])[::-1]  # sum_{t>=j} delta_t^2
    f = L * L / (2 * (L - mu)) * (2 * g * dl - g * g - q * tail)
    entries = []
    for j in range(N + 1):
        x = np.zeros(d)
        x[:j] = -dl[:j]
        gv = np.zeros(d)
        gv[j] = L * g[j]
        entries.append(Triplet(x, gv, f[j]))
    xs = np.zeros(d)
    xs[: N + 1] = -dl
    return TripletSet(tuple(entries), Triplet(xs, np.zeros(d), 0.0))


def build_hard_instance(s: Schedule, dim: int | None = None) -> HardInstance:
    """Hard triplet set for a valid schedule, optionally zero-padded to `dim`."""
    if s.params.mu < 0:
        raise ValueError("hard instances need mu >= 0")
    rep = validate_schedule(s)
    if not rep.passed:
        raise ValueError("invalid schedule: " + ", ".join(c.name for c in rep.failures()))
    return HardInstance(build_triplets(s, dim), s)


def compute_Kj(h: HardInstance, j: int) -> list:
    """Labels ``k`` whose ``w_k`` is linearly independent of ``w_0..w_j``."""
    if not 0 <= j <= h.N - 1:
        raise ValueError(f"j must lie in [0, N-1] = [0, {h.N - 1}]")
    W = h.W
    base = W[: j + 1]
    r = _rank(base)
    out = []
    for idx, label in enumerate(h.triplets.labels):
        if _rank(np.vstack([base, W[idx]])) > r:
            out.append(label)
    return out


def _score(h: HardInstance, i_row: int, rows: np.ndarray) -> np.ndarray:
    """``f_k - <w_i, w_k>/(L-mu) + |g_k - L x_k|^2/(2(L-mu)) - L/2 |x_k|^2`` for k in rows."""
    mu, L = h.params.mu, h.params.L
    T = h.triplets
    W = h.W
    X, G, F = T.X[rows], T.G[rows], T.F[rows]
    kappa = L - mu
    c = F + np.sum((G - L * X) ** 2, axis=1) / (2 * kappa) - 0.5 * L * np.sum(X * X, axis=1)
    return c - (W[rows] @ W[i_row]) / kappa


def separating_vector(h: HardInstance, j: int, K: list) -> tuple[np.ndarray, float]:
    """Vector ``v`` with ``<w_j, v> > <w_k, v>`` for all k in K, and the margin.

    Tries ``e_j`` first; on a tie (``L gamma_j = mu delta_j``) uses
    ``-sum_{t>j} e_t``.
    """
    W = h.W
    rows = [h.triplets.index(k) for k in K]
    d = h.dim
    v = np.zeros(d)
    v[j] = 1.0
    m1 = float(W[j] @ v - (W[rows] @ v).max()) if rows else np.inf
    if abs(m1) > TIE_TOL:
        return v, m1
    v = np.zeros(d)
    v[j + 1 :] = -1.0
    return v, float(W[j] @ v - (W[rows] @ v).max())


def validate_corollary1(h: HardInstance, tol: float = INEQ_TOL) -> ValidationReport:
    """Numerically check every hypothesis of the zero-chain lower-bound
    construction on the triplets of `h`, plus the function-value and (for
    ``mu > 0``) distance bound conditions."""
    T = h.triplets
    mu, L, R = h.params.mu, h.params.L, h.params.R_x
    N = h.N
    W = h.W
    star = T.index(STAR)
    X, G = T.X, T.G
    rep = ValidationReport(f"lower-bound conditions N={N}")
    scale = max(1.0, R) ** 2 * max(1.0, L)

    base = max(float(np.abs(X[0]).max()), float(np.abs(G[star]).max()))
    rep.add("base", base <= EQ_ABS, base, "x_0 = 0, g_* = 0")

    dist = float(np.linalg.norm(X[0] - X[star]))
    rep.add("initial_distance", dist <= R * (1 + EQ_REL) + EQ_ABS, dist - R, "|x_0 - x_*| <= R_x")

    V = interpolation_violations(T, h.params)  # V[i, j]: pair (i, j)
    worst = float(V[star, :].max())
    rep.add("star_interpolation", worst <= tol * scale, worst, "optimality of x_* for every j")

    K = [compute_Kj(h, j) for j in range(N)]
    worst_f = 0.0
    worst_g = -np.inf
    for j in range(N):
        Krows = np.array([T.index(k) for k in K[j]], dtype=int)
        if Krows.size == 0:
            continue
        for i in range(j):
            d = np.abs(W[Krows] @ W[i] - W[j] @ W[i])
            worst_f = max(worst_f, float(d.max()))
        for i in range(len(T)):
            sj = _score(h, i, np.array([j]))[0]
            sk = _score(h, i, Krows)
            worst_g = max(worst_g, float((sk - sj).max()))
    rep.add("inner_products", worst_f <= EQ_ABS * scale, worst_f, "<w_i, w_j> = <w_i, w_k>, k in K*_j")
    if N >= 1:
        rep.add("ordering", worst_g <= tol * scale, worst_g, "score_j >= score_k for k in K*_j, all i")
    else:
        rep.skip("ordering", "N = 0")

    sep_margin = np.inf
    for j in range(N):
        if K[j]:
            _, m = separating_vector(h, j, K[j])
            sep_margin = min(sep_margin, m)
    if N >= 1 and np.isfinite(sep_margin):
        rep.add("separable", sep_margin > 0, -sep_margin, "w_j separable from {w_k}_{K*_j}")
    else:
        rep.skip("separable", "no chain levels")

    gN, xN = G[N], X[N]
    worst = max((abs(float(gN @ W[i])) for i in range(N)), default=0.0)
    rep.add("fbound_orth", worst <= EQ_ABS * scale, worst, "<g_N, w_i> = 0, i < N")
    worst = abs(float(gN @ xN))
    rep.add("fbound_self", worst <= EQ_ABS * scale, worst, "<g_N, x_N> = 0")

    if mu > 0:
        dv = xN - X[star]
        worst = max((abs(float(dv @ W[i])) for i in range(N)), default=0.0)
        rep.add("xbound_orth", worst <= EQ_ABS * scale, worst, "<x_N - x_*, w_i> = 0, i < N")
        worst = abs(float(dv @ xN))
        rep.add("xbound_self", worst <= EQ_ABS * scale, worst, "<x_N - x_*, x_N> = 0")
    else:
        rep.skip("xbound_orth", "mu = 0")
        rep.skip("xbound_self", "mu = 0")
    return rep


class CertificateError(RuntimeError):
    pass


def span_distance_certificate(h: HardInstance, tol: float = 1e-10) -> float:
    """``min over y in span{w_0..w_{N-1}}`` of ``|y - x_*|``, by projection.

    Raises `CertificateError` unless it equals ``|x_N - x_*|``.
    """
    if not h.params.mu > 0:
        raise ValueError("the distance certificate needs mu > 0")
    B = h.chain_basis(h.N)
    res = projection_residual(h.x_star, B)
    dist = float(np.linalg.norm(res))
    target = float(np.linalg.norm(h.triplets[h.N].x - h.x_star))
    if abs(dist - target) > tol * max(1.0, target):
        raise CertificateError(f"span distance {dist!r} differs from |x_N - x_*| = {target!r}")
    return dist


@dataclass(frozen=True)
class ValueCertificate:
    bound: float
    min_sampled_gap: float
    attained_gap: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.min_sampled_gap >= -INEQ_TOL and abs(self.attained_gap) <= 1e-8


def span_value_sweep(h: HardInstance, oracle: ExtensionOracle | None = None, samples: int = 200,
                     seed: int = 0) -> ValueCertificate:
    """Sample the extension over the chain span and compare with ``f_N``."""
    oracle = h.oracle() if oracle is None else oracle
    N = h.N
    fN = float(h.triplets.F[N])
    fstar = float(h.triplets.star.f)
    B = h.chain_basis(N)
    rng = np.random.default_rng(seed)
    R = h.params.R_x
    gaps = []
    for _ in range(samples):
        if B.shape[1] == 0:
            y = np.zeros(h.dim)
        else:
            y = B @ (rng.standard_normal(B.shape[1]) * R)
        gaps.append(eval_oracle(oracle, y).value - fN)
    xN = h.triplets[N].x
    y_att = B @ (B.T @ xN) if B.shape[1] else np.zeros(h.dim)
    att = eval_oracle(oracle, y_att).value - fN
    return ValueCertificate(fN - fstar, min(gaps, default=np.inf), float(att), samples)


def span_value_certificate(h: HardInstance, oracle: ExtensionOracle | None = None, samples: int = 200,
                           seed: int = 0) -> float:
    """``f_N - f_*`` after confirming the extension stays above ``f_N`` on
    sampled span points and equals it at the projection of ``x_N``."""
    cert = span_value_sweep(h, oracle, samples, seed)
    if not cert.passed:
        raise CertificateError(
            f"value certificate failed: min sampled gap {cert.min_sampled_gap:.3e}, "
            f"attained gap {cert.attained_gap:.3e}"
        )
    return cert.bound


def zero_chain_residuals(W: np.ndarray, oracle: ExtensionOracle, levels: int, trials: int = 100,
                         seed: int = 0, radius: float = 1.0) -> np.ndarray:
    """Worst relative projection residual of the gradient per chain level.

    Level ``j`` samples ``y`` in ``span{w_0..w_{j-1}}`` (only ``y = 0`` when
    ``j = 0``) and measures how far ``grad V(y)`` sits from
    ``span{w_0..w_j}``, relative to ``1 + |grad V(y)|``.
    """
    rng = np.random.default_rng(seed)
    out = np.zeros(levels)
    for j in range(levels):
        Bin = span_basis(W[:j])
        Bout = span_basis(W[: j + 1])
        n = 1 if Bin.shape[1] == 0 else trials
        worst = 0.0
        for _ in range(n):
            if Bin.shape[1] == 0:
                y = np.zeros(W.shape[1])
            else:
                y = Bin @ (rng.standard_normal(Bin.shape[1]) * radius)
            g = eval_oracle(oracle, y).gradient
            r = float(np.linalg.norm(projection_residual(g, Bout)))
            worst = max(worst, r / (1.0 + float(np.linalg.norm(g))))
        out[j] = worst
    return out


def verify_zero_chain(h: HardInstance, oracle: ExtensionOracle | None = None, trials: int = 100,
                      seed: int = 0, tol: float = 1e-8) -> ValidationReport:
    oracle = h.oracle() if oracle is None else oracle
    rep = ValidationReport("zero-chain")
    if h.N == 0:
        rep.skip("zero_chain", "N = 0")
        return rep
    res = zero_chain_residuals(h.W, oracle, h.N, trials, seed, h.params.R_x)
    lvl = int(np.argmax(res))
    rep.add("zero_chain", res.max() <= tol, float(res.max()), f"worst level {lvl}")
    return rep


def full_report(h: HardInstance, trials: int = 100, seed: int = 0) -> ValidationReport:
    """Schedule, lower-bound and interpolation checks plus sampled oracle audits."""
    from .audit import oracle_audit

    rep = ValidationReport(f"instance {h.schedule.kind.value} N={h.N} dim={h.dim}")
    rep.extend(validate_schedule(h.schedule))
    rep.extend(validate_corollary1(h))
    rep.extend(check_interpolation_conditions(h.triplets, h.params))
    oracle = h.oracle()
    # oracle reproduces the data at every node
    worst_f = worst_g = 0.0
    for k, t in enumerate(h.triplets.all()):
        r = eval_oracle(oracle, t.x)
        worst_f = max(worst_f, abs(r.value - t.f))
        worst_g = max(worst_g, float(np.linalg.norm(r.gradient - t.g)))
    rep.add("node_values", worst_f <= 1e-9, worst_f, "V(x_i) = f_i")
    rep.add("node_gradients", worst_g <= 1e-8, worst_g, "grad V(x_i) = g_i")
    if trials > 0:
        rep.extend(verify_zero_chain(h, oracle, trials, seed))
        rep.extend(oracle_audit(oracle, points=trials, seed=seed))
        cert = span_value_sweep(h, oracle, samples=trials, seed=seed)
        rep.add("span_value", cert.passed, -cert.min_sampled_gap if cert.min_sampled_gap < 0 else abs(cert.attained_gap),
                f"bound f_N - f_* = {cert.bound:.17g}")
    else:
        rep.skip("zero_chain", "trials = 0")
        rep.skip("span_value", "trials = 0")
    if h.params.mu > 0:
        try:
            d = span_distance_certificate(h)
            rep.add("span_distance", True, 0.0, f"distance {d:.17g}")
        except CertificateError as e:
            rep.add("span_distance", False, np.inf, str(e))
    else:
        rep.skip("span_distance", "mu = 0")
    return rep

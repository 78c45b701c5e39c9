"""The strongly convex extension of a finite triplet set.

For triplets ``(x_i, g_i, f_i)`` and ``mu < L`` define ``w_i = g_i - mu x_i``,
``c_i = f_i + |g_i - L x_i|^2 / (2(L-mu)) - L/2 |x_i|^2`` and

    v(y, a) = L/2 |y|^2 - (L-mu)/2 |y - W a / (L-mu)|^2 + c @ a
    V(y)    = max over the unit simplex of v(y, a).

``V`` is mu-strongly convex with L-Lipschitz gradient
``mu y + W a*``, lies above every lower quadratic
``f_i + <g_i, y - x_i> + mu/2 |y - x_i|^2``, and reproduces ``(f_i, g_i)`` at
every ``x_i`` whose interpolation inequalities hold.
"""

from __future__ import annotations

import numpy as np

from . import simplex
from .model import (
    EQ_ABS,
    EQ_REL,
    INEQ_TOL,
    ClassParams,
    OracleResponse,
    TripletSet,
    ValidationReport,
    as_vector,
)
from .simplex import SimplexQPResult

__all__ = [
    "ExtensionOracle",
    "SimplexQPResult",
    "v_quad",
    "maximize_simplex",
    "eval_oracle",
    "check_interpolation_conditions",
    "interpolation_violations",
    "check_lower_quadratic",
    "kkt_violation",
    "finite_difference_gradient",
]


class ExtensionOracle:
    """First-order oracle for the extension of `triplets`.

    ``mu`` may be negative here; only instance building needs ``mu >= 0``.
    Instances are immutable and may be shared between threads.
    """

    def __init__(self, triplets: TripletSet, params: ClassParams):
        self.triplets = triplets
        self.params = params
        mu, L = params.mu, params.L
        X, G, F = triplets.X, triplets.G, triplets.F
        kappa = L - mu
        self.kappa = kappa
        self.W = G - mu * X  # rows w_i
        self.c = F + np.sum((G - L * X) ** 2, axis=1) / (2 * kappa) - 0.5 * L * np.sum(X * X, axis=1)
        self.H = (self.W @ self.W.T) / kappa
        for a in (self.W, self.c, self.H):
            a.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.triplets.dim

    @property
    def size(self) -> int:
        return len(self.triplets)

    def linear_term(self, y: np.ndarray) -> np.ndarray:
        return self.W @ y + self.c

    def quad(self, y, alpha) -> float:
        return v_quad(self, y, alpha)

    def maximize(self, y, support=None) -> SimplexQPResult:
        return maximize_simplex(self, y, support=support)

    def __call__(self, y, support=None) -> OracleResponse:
        return eval_oracle(self, y, support=support)

    def value(self, y) -> float:
        return self.maximize(y).value

    def gradient(self, y) -> np.ndarray:
        return eval_oracle(self, y).gradient

    def lower_quadratics(self, y) -> np.ndarray:
        """``f_i + <g_i, y - x_i> + mu/2 |y - x_i|^2`` for every index."""
        y = as_vector(y, self.dim)
        X, G, F = self.triplets.X, self.triplets.G, self.triplets.F
        D = y - X
        return F + np.sum(G * D, axis=1) + 0.5 * self.params.mu * np.sum(D * D, axis=1)


def v_quad(oracle: ExtensionOracle, y, alpha) -> float:
    y = as_vector(y, oracle.dim)
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (oracle.size,):
        raise ValueError(f"alpha must have {oracle.size} entries, got shape {alpha.shape}")
    if alpha.min() < -INEQ_TOL or abs(alpha.sum() - 1.0) > INEQ_TOL:
        raise ValueError("alpha is not in the unit simplex")
    L, kappa = oracle.params.L, oracle.kappa
    r = y - (oracle.W.T @ alpha) / kappa
    return float(0.5 * L * (y @ y) - 0.5 * kappa * (r @ r) + oracle.c @ alpha)


def maximize_simplex(oracle: ExtensionOracle, y, support=None) -> SimplexQPResult:
    """Global maximizer of ``a -> v(y, a)`` over the unit simplex.

    In terms of ``a`` this is ``const + b @ a - a @ H @ a / 2`` with
    ``b = W y + c`` and ``H = W W^T / (L - mu)``.
    """
    y = as_vector(y, oracle.dim)
    b = oracle.linear_term(y)
    res = simplex.maximize(oracle.H, b, support=support)
    # value computed from the definition, not from the reduced objective
    value = v_quad(oracle, y, res.alpha)
    return SimplexQPResult(res.alpha, value, res.active_set, res.kkt_residual, res.method)


def eval_oracle(oracle: ExtensionOracle, y, support=None) -> OracleResponse:
    y = as_vector(y, oracle.dim)
    res = maximize_simplex(oracle, y, support=support)
    grad = oracle.params.mu * y + oracle.W.T @ res.alpha
    grad.setflags(write=False)
    return OracleResponse(res.value, grad, res.alpha)


def kkt_violation(oracle: ExtensionOracle, y, alpha) -> float:
    """Largest violation of the simplex optimality inequalities for ``alpha`` at ``y``.

    With ``s_j = <w_j, y - W alpha/(L-mu)> + c_j``, optimality means
    ``s_j <= s_k`` for all ``j`` and every ``k`` with ``alpha_k > 0``.
    """
    y = as_vector(y, oracle.dim)
    alpha = np.asarray(alpha, dtype=float)
    s = oracle.W @ (y - oracle.W.T @ alpha / oracle.kappa) + oracle.c
    return max(0.0, float(s.max() - s[alpha > 0].min()))


def interpolation_violations(triplets: TripletSet, params: ClassParams) -> np.ndarray:
    """Matrix ``V[i, j]`` = lhs - rhs of the interpolation inequality for the
    ordered pair ``(i, j)``; positive entries are violations."""
    mu, L = params.mu, params.L
    X, G, F = triplets.X, triplets.G, triplets.F
    dX = X[:, None, :] - X[None, :, :]
    dG = G[:, None, :] - G[None, :, :]
    lhs = np.sum(dG * dG, axis=2) / (2 * L)
    r = dX - dG / L
    lhs = lhs + mu * L / (2 * (L - mu)) * np.sum(r * r, axis=2)
    rhs = F[:, None] - F[None, :] - np.einsum("jd,ijd->ij", G, dX)
    return lhs - rhs


def check_interpolation_conditions(
    triplets: TripletSet, params: ClassParams, tol: float = INEQ_TOL
) -> ValidationReport:
    """Pairwise smooth strongly convex interpolation test over all ordered pairs."""
    rep = ValidationReport("interpolation conditions")
    V = interpolation_violations(triplets, params)
    np.fill_diagonal(V, -np.inf)
    if V.size == 1:
        rep.add("interpolation", True, 0.0, "single triplet")
        return rep
    i, j = np.unravel_index(np.argmax(V), V.shape)
    worst = float(V[i, j])
    scale = 1.0 + float(np.abs(triplets.F).max())
    labels = triplets.labels
    rep.add("interpolation", worst <= tol * scale, worst, f"worst pair ({labels[i]}, {labels[j]})")
    return rep


def check_lower_quadratic(oracle: ExtensionOracle, y, tol: float = EQ_ABS) -> ValidationReport:
    """``V(y) >= f_i + <g_i, y - x_i> + mu/2 |y - x_i|^2`` for every index."""
    rep = ValidationReport("lower quadratics")
    val = eval_oracle(oracle, y).value
    low = oracle.lower_quadratics(y)
    worst = float((low - val).max())
    scale = 1.0 + abs(val)
    k = int(np.argmax(low - val))
    rep.add("lower_quadratic", worst <= tol * scale + EQ_REL * abs(val), worst,
            f"tightest index {oracle.triplets.labels[k]}")
    return rep


def finite_difference_gradient(oracle: ExtensionOracle, y, h: float | None = None) -> np.ndarray:
    """Central differences of the extension value, one coordinate at a time.

    The default step is ``eps**(1/3) * (1 + |y|)``. Each perturbed solve is
    warm-started from the support at ``y``.
    """
    y = as_vector(y, oracle.dim)
    if h is None:
        h = np.finfo(float).eps ** (1 / 3) * (1.0 + float(np.linalg.norm(y)))
    supp = maximize_simplex(oracle, y).active_set
    out = np.empty(oracle.dim)
    for k in range(oracle.dim):
        e = np.zeros(oracle.dim)
        e[k] = h
        fp = maximize_simplex(oracle, y + e, support=supp).value
        fm = maximize_simplex(oracle, y - e, support=supp).value
        out[k] = (fp - fm) / (2 * h)
    return out

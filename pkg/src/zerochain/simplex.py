"""Maximize a concave quadratic over the unit simplex.

Problem::

    maximize   b @ a - 0.5 * a @ H @ a
    subject to a >= 0, sum(a) = 1

with ``H`` symmetric positive semidefinite (possibly singular). A point is
optimal iff the scores ``h = b - H @ a`` satisfy ``h_j <= h_k`` for every
``j`` and every ``k`` in the support of ``a``.

The main solver is a primal active-set method; its answer is always
certified against the optimality conditions, with exhaustive support
enumeration (small problems) or projected gradient plus polishing (large
problems) as fallbacks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

KKT_TOL = 1e-10
ENUMERATION_LIMIT = 16


class SimplexQPError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimplexQPResult:
    alpha: np.ndarray
    value: float
    active_set: tuple[int, ...]
    kkt_residual: float
    method: str = "active-set"


def objective(H: np.ndarray, b: np.ndarray, alpha: np.ndarray) -> float:
    return float(b @ alpha - 0.5 * alpha @ H @ alpha)


def kkt_residual(H: np.ndarray, b: np.ndarray, alpha: np.ndarray) -> float:
    """``max_j h_j - min_{k: alpha_k > 0} h_k``, clipped at zero."""
    h = b - H @ alpha
    supp = alpha > 0
    if not supp.any():
        return np.inf
    return max(0.0, float(h.max() - h[supp].min()))


def kkt_tolerance(H: np.ndarray, b: np.ndarray, tol: float = KKT_TOL) -> float:
    scale = float(np.abs(b).max(initial=0.0) + np.abs(H).max(initial=0.0))
    return tol * (1.0 + scale)


_NULL_CACHE: dict[int, np.ndarray] = {}


def _null_basis(m: int) -> np.ndarray:
    Z = _NULL_CACHE.get(m)
    if Z is None:
        v = np.ones(m) / np.sqrt(m)
        # Householder reflector mapping e_0 to v; its other columns span v's complement
        u = v.copy()
        u[0] -= 1.0
        nu = np.linalg.norm(u)
        if nu == 0:
            Z = np.eye(m)[:, 1:]
        else:
            u /= nu
            P = np.eye(m) - 2.0 * np.outer(u, u)
            Z = P[:, 1:]
        Z.setflags(write=False)
        _NULL_CACHE[m] = Z
    return Z


def _solve_on_support(H: np.ndarray, b: np.ndarray, S) -> np.ndarray | None:
    """Stationary point of the objective on the affine hull of face ``S``,
    or None when the face has no stationary point."""
    S = np.asarray(S)
    m = S.size
    n = b.size
    alpha = np.zeros(n)
    if m == 1:
        alpha[S] = 1.0
        return alpha
    Z = _null_basis(m)
    HS = H[np.ix_(S, S)]
    a0 = np.full(m, 1.0 / m)
    hz = Z.T @ (b[S] - HS @ a0)
    M = Z.T @ HS @ Z
    w, V = np.linalg.eigh(M)
    thr = 1e-12 * max(float(np.abs(w).max(initial=0.0)), 1e-300)
    pos = w > thr
    coef = V.T @ hz
    if np.any(np.abs(coef[~pos]) > 1e-12 * (1.0 + np.abs(hz).max(initial=0.0))):
        return None
    t = V[:, pos] @ (coef[pos] / w[pos])
    alpha[S] = a0 + Z @ t
    return alpha


def _active_set(H, b, alpha, tol, max_iter):
    free = alpha > 0
    scale = 1.0 + float(np.abs(b).max(initial=0.0) + np.abs(H).max(initial=0.0))
    add_tol = 1e-14 * scale
    for _ in range(max_iter):
        F = np.flatnonzero(free)
        h = b - H @ alpha
        m = F.size
        p = np.zeros(m)
        bounded = True
        if m > 1:
            Z = _null_basis(m)
            HF = H[np.ix_(F, F)]
            hz = Z.T @ h[F]
            M = Z.T @ HF @ Z
            w, V = np.linalg.eigh(M)
            thr = 1e-12 * max(float(np.abs(w).max(initial=0.0)), 1e-300)
            pos = w > thr
            coef = V.T @ hz
            flat = coef[~pos]
            if flat.size and np.abs(flat).max() > 1e-13 * scale:
                # zero-curvature ascent direction: move until a bound blocks
                p = Z @ (V[:, ~pos] @ flat)
                bounded = False
            else:
                p = Z @ (V[:, pos] @ (coef[pos] / w[pos]))
        if np.abs(p).max(initial=0.0) <= 1e-13:
            t = float(h[F].min())
            out = np.flatnonzero(~free)
            if out.size:
                j = out[np.argmax(h[out])]
                if h[j] - t > add_tol:
                    free[j] = True
                    continue
            return alpha
        neg = p < 0
        ratios = -alpha[F][neg] / p[neg]
        k = int(np.argmin(ratios))
        tmax = float(ratios[k])
        step = tmax if not bounded else min(1.0, tmax)
        new = alpha.copy()
        new[F] = alpha[F] + step * p
        if step == tmax:
            blocking = F[np.flatnonzero(neg)[k]]
            new[blocking] = 0.0
            free[blocking] = False
        new[F] = np.maximum(new[F], 0.0)
        total = new.sum()
        alpha = new / total
        free &= alpha > 0
    raise SimplexQPError("active-set iteration limit reached")


def _enumerate(H, b, tol):
    n = b.size
    for size in range(1, n + 1):
        for S in itertools.combinations(range(n), size):
            a = _solve_on_support(H, b, S)
            if a is None:
                continue
            if a.min() < -1e-12:
                continue
            a = np.maximum(a, 0.0)
            a /= a.sum()
            if kkt_residual(H, b, a) <= tol:
                return a
    raise SimplexQPError("support enumeration found no optimality-certified point")


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the unit simplex (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.flatnonzero(u - css / idx > 0)[-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def _projected_gradient(H, b, alpha, tol, max_iter=100_000):
    lip = float(np.linalg.eigvalsh(H).max(initial=0.0))
    step = 1.0 / lip if lip > 0 else 1.0
    x = alpha.copy()
    z = x.copy()
    t = 1.0
    for _ in range(max_iter):
        h = b - H @ z
        x_new = project_simplex(z + step * h)
        t_new = (1 + np.sqrt(1 + 4 * t * t)) / 2
        z = x_new + (t - 1) / t_new * (x_new - x)
        x, t = x_new, t_new
        hx = b - H @ x
        if float(hx.max() - hx @ x) <= 1e-12:
            break
    # polish on the identified support
    S = np.flatnonzero(x > 1e-9)
    a = _solve_on_support(H, b, S)
    if a is not None and a.min() >= -1e-12:
        a = np.maximum(a, 0.0)
        a /= a.sum()
        if kkt_residual(H, b, a) <= tol:
            return a
    if kkt_residual(H, b, x) <= tol:
        return x
    raise SimplexQPError("projected gradient did not reach a certified point")


def maximize(H, b, support=None, tol: float = KKT_TOL) -> SimplexQPResult:
    """Maximize ``b @ a - a @ H @ a / 2`` over the unit simplex.

    Parameters
    ----------
    H : (n, n) array
        Positive semidefinite curvature matrix.
    b : (n,) array
        Linear coefficients.
    support : sequence of int, optional
        Warm-start guess of the optimal support, e.g. from a nearby point.
    tol : float
        Relative optimality tolerance for the certificate.
    """
    H = np.asarray(H, dtype=float)
    b = np.asarray(b, dtype=float)
    n = b.size
    if H.shape != (n, n):
        raise ValueError(f"H must be {n}x{n}, got {H.shape}")
    atol = kkt_tolerance(H, b, tol)

    start = None
    if support is not None and len(support):
        a = _solve_on_support(H, b, sorted(support))
        if a is not None and a.min() >= 0:
            start = a / a.sum()
            if kkt_residual(H, b, start) <= atol:
                return _result(H, b, start, "warm")
    if start is None:
        start = np.zeros(n)
        start[int(np.argmax(b - 0.5 * np.diag(H)))] = 1.0

    method = "active-set"
    try:
        alpha = _active_set(H, b, start, atol, max_iter=20 * n + 50)
        if kkt_residual(H, b, alpha) > atol:
            raise SimplexQPError("uncertified active-set answer")
    except SimplexQPError:
        if n <= ENUMERATION_LIMIT:
            alpha = _enumerate(H, b, atol)
            method = "enumeration"
        else:
            alpha = _projected_gradient(H, b, start, atol)
            method = "projected-gradient"
    return _result(H, b, alpha, method)


def _result(H, b, alpha, method):
    alpha = np.asarray(alpha, dtype=float)
    alpha.setflags(write=False)
    return SimplexQPResult(
        alpha=alpha,
        value=objective(H, b, alpha),
        active_set=tuple(int(i) for i in np.flatnonzero(alpha > 0)),
        kkt_residual=kkt_residual(H, b, alpha),
        method=method,
    )


def maximize_by_enumeration(H, b, tol: float = KKT_TOL) -> SimplexQPResult:
    """Reference solver: first certified support in (size, lexicographic) order."""
    H = np.asarray(H, dtype=float)
    b = np.asarray(b, dtype=float)
    return _result(H, b, _enumerate(H, b, kkt_tolerance(H, b, tol)), "enumeration")

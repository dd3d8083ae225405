"""Numerical kernels: soft-thresholding, coordinate-descent LASSO,
graphical lasso and golden-section scalar maximisation.

Every routine is deterministic: coordinates are visited in ascending
index order and no randomness is involved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numba import njit

LASSO_TOL = 1e-7
LASSO_MAX_SWEEPS = 1000
GLASSO_TOL = 1e-4
GLASSO_MAX_ITERS = 100
# inner subproblems of the graphical lasso are solved much tighter than the
# outer stopping rule so the returned precision satisfies its KKT conditions
GLASSO_INNER_TOL = 1e-10

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class SingularCovarianceError(ValueError):
    """Raised when an unpenalised precision estimate is requested for a
    singular sample covariance."""


@dataclass(frozen=True)
class LassoFit:
    weights: np.ndarray
    intercept: float
    lam: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class PrecisionFit:
    precision: np.ndarray
    covariance: np.ndarray
    lam: float
    iterations: int
    converged: bool
    objectives: list = field(default_factory=list, repr=False)


def soft_threshold(z, gamma):
    """``sign(z) * max(|z| - gamma, 0)``; works on scalars and arrays."""
    if np.any(np.asarray(gamma) < 0):
        raise ValueError("gamma must be non-negative")
    out = np.sign(z) * np.maximum(np.abs(z) - gamma, 0.0)
    if np.ndim(out) == 0:
        return float(out)
    return out


@njit(cache=True)
def _cd_gram_kernel(gram, corr, lam, w, tol, max_sweeps):
    p = gram.shape[0]
    # q = c - G w, kept up to date after every coordinate move
    q = corr - gram @ w
    for sweep in range(1, max_sweeps + 1):
        max_change = 0.0
        for j in range(p):
            gjj = gram[j, j]
            old = w[j]
            if gjj <= 0.0:
                new = 0.0
            else:
                z = q[j] + gjj * old
                if z > lam:
                    new = (z - lam) / gjj
                elif z < -lam:
                    new = (z + lam) / gjj
                else:
                    new = 0.0
            delta = new - old
            if delta != 0.0:
                w[j] = new
                for k in range(p):
                    q[k] -= gram[j, k] * delta
                if abs(delta) > max_change:
                    max_change = abs(delta)
        if max_change < tol:
            return sweep, True
    return max_sweeps, False


def _cd_gram(gram, corr, lam, w, tol, max_sweeps):
    """Cyclic coordinate descent on ``0.5 w'Gw - c'w + lam |w|_1`` for a
    symmetric Gram matrix ``G``.

    ``w`` is updated in place. Returns ``(sweeps, converged)``.
    """
    gram = np.ascontiguousarray(gram, dtype=np.float64)
    corr = np.ascontiguousarray(corr, dtype=np.float64)
    sweeps, converged = _cd_gram_kernel(gram, corr, float(lam), w, float(tol), int(max_sweeps))
    return int(sweeps), bool(converged)


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise ValueError("input contains NaN or infinity")


def lasso_objective(X, y, weights, intercept, lam):
    """``(1/2n) ||y - b0 - Xw||^2 + lam ||w||_1``."""
    resid = y - intercept - X @ weights
    return 0.5 * float(resid @ resid) / len(y) + lam * float(np.abs(weights).sum())


def lasso_lambda_max(X, y):
    """Smallest penalty at which every coefficient is exactly zero."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    Xc = X - X.mean(axis=0)
    return float(np.max(np.abs(Xc.T @ (y - y.mean())))) / len(y)


def lasso_cd(
    X,
    y,
    lam: float,
    init: Optional[np.ndarray] = None,
    tol: float = LASSO_TOL,
    max_sweeps: int = LASSO_MAX_SWEEPS,
) -> LassoFit:
    """Fit the LASSO with an unpenalised intercept by coordinate descent.

    The intercept is profiled out: with centred columns the optimal
    intercept for any ``w`` is ``mean(y) - mean(X) @ w``, so it is exact
    after every sweep rather than a separate coordinate.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError(f"X has shape {X.shape} but y has length {y.shape[0]}")
    n, p = X.shape
    if n < 1 or p < 1:
        raise ValueError("need at least one sample and one feature")
    if lam < 0:
        raise ValueError("lam must be non-negative")
    _check_finite(X, y)

    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    Xc = X - x_mean
    gram = Xc.T @ Xc / n
    corr = Xc.T @ (y - y_mean) / n
    w = np.zeros(p) if init is None else np.array(init, dtype=float, copy=True)
    if w.shape != (p,):
        raise ValueError(f"warm start has shape {w.shape}, expected ({p},)")
    sweeps, converged = _cd_gram(gram, corr, float(lam), w, tol, max_sweeps)
    return LassoFit(
        weights=w,
        intercept=y_mean - float(x_mean @ w),
        lam=float(lam),
        iterations=sweeps,
        converged=converged,
    )


def default_lambda_grid(lam_max: float, n_lambdas: int = 100, eps: float = 1e-3) -> np.ndarray:
    if lam_max <= 0:
        # every penalty gives the null model; keep the grid strictly positive
        lam_max = 1.0
    return np.geomspace(lam_max, lam_max * eps, n_lambdas)


def lasso_path(
    X,
    y,
    lambdas: Optional[Sequence[float]] = None,
    tol: float = LASSO_TOL,
    max_sweeps: int = LASSO_MAX_SWEEPS,
) -> list[LassoFit]:
    """Warm-started LASSO fits along a strictly descending penalty grid."""
    if lambdas is None:
        lambdas = default_lambda_grid(lasso_lambda_max(X, y))
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.size == 0:
        raise ValueError("empty lambda grid")
    if np.any(np.diff(lambdas) >= 0):
        raise ValueError("lambda grid must be strictly descending")
    fits = []
    w = None
    for lam in lambdas:
        fit = lasso_cd(X, y, lam, init=w, tol=tol, max_sweeps=max_sweeps)
        w = fit.weights
        fits.append(fit)
    return fits


def glasso_objective(S, precision, lam):
    """``tr(S Theta) - log det Theta + lam * sum_{i != j} |Theta_ij|``."""
    sign, logdet = np.linalg.slogdet(precision)
    if sign <= 0:
        return math.inf
    off = np.abs(precision).sum() - np.abs(np.diag(precision)).sum()
    return float(np.sum(S * precision)) - logdet + lam * off


def _is_pd(A):
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        return False
    return True


def _precision_from_blocks(W, B):
    d = W.shape[0]
    theta = np.zeros((d, d))
    idx = np.arange(d)
    for j in range(d):
        rest = idx != j
        beta = B[j]
        tjj = 1.0 / (W[j, j] - W[rest, j] @ beta)
        theta[j, j] = tjj
        theta[rest, j] = -beta * tjj
    return 0.5 * (theta + theta.T)


def graphical_lasso(
    S,
    lam: float,
    tol: float = GLASSO_TOL,
    max_iters: int = GLASSO_MAX_ITERS,
    inner_tol: float = GLASSO_INNER_TOL,
    inner_max_sweeps: int = LASSO_MAX_SWEEPS,
) -> PrecisionFit:
    """Sparse precision estimate by block coordinate descent.

    Minimises ``tr(S Theta) - log det Theta + lam * sum_{i!=j} |Theta_ij|``
    over positive-definite ``Theta``. The diagonal is not penalised, so the
    working covariance keeps ``W_jj = S_jj`` throughout. Each column update
    is a LASSO problem in Gram form solved by the same coordinate-descent
    kernel as :func:`lasso_cd`.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"S must be square, got shape {S.shape}")
    _check_finite(S)
    if np.max(np.abs(S - S.T)) > 1e-8:
        raise ValueError("S is not symmetric within 1e-8")
    if np.any(np.diag(S) <= 0):
        raise ValueError("S must have a strictly positive diagonal")
    if lam < 0:
        raise ValueError("lam must be non-negative")
    S = 0.5 * (S + S.T)
    d = S.shape[0]
    s_is_pd = _is_pd(S)
    if lam == 0 and not s_is_pd:
        raise SingularCovarianceError(
            "sample covariance is singular; an unpenalised precision does not exist"
        )

    if s_is_pd:
        W = S.copy()
    else:
        W = 0.95 * S + 0.05 * np.diag(np.diag(S))
    B = np.zeros((d, d - 1))
    off_mask = ~np.eye(d, dtype=bool)
    scale = float(np.mean(np.abs(S[off_mask]))) if d > 1 else 0.0
    threshold = tol * scale if scale > 0 else tol

    # at tiny penalties on a singular S the iterates may blow up; that is
    # reported through ``converged`` rather than floating-point warnings
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        theta, objectives, converged, it = _glasso_loop(S, W, B, lam, max_iters, threshold, inner_tol, inner_max_sweeps)
        if not (np.all(np.isfinite(theta)) and _is_pd(theta)):
            converged = False
    return PrecisionFit(
        precision=theta,
        covariance=W,
        lam=float(lam),
        iterations=it,
        converged=converged,
        objectives=objectives,
    )


def _glasso_loop(S, W, B, lam, max_iters, threshold, inner_tol, inner_max_sweeps):
    d = S.shape[0]
    idx = np.arange(d)
    objectives = []
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        W_old = W.copy()
        for j in range(d):
            rest = idx != j
            W11 = W[np.ix_(rest, rest)]
            s12 = S[rest, j]
            beta = B[j]
            _cd_gram(W11, s12, float(lam), beta, inner_tol, inner_max_sweeps)
            w12 = W11 @ beta
            W[rest, j] = w12
            W[j, rest] = w12
        theta = _precision_from_blocks(W, B)
        objectives.append(glasso_objective(S, theta, lam))
        if not np.all(np.isfinite(W)):
            break
        if np.mean(np.abs(W - W_old)) < threshold:
            converged = True
            break

    return _precision_from_blocks(W, B), objectives, converged, it


def maximize_scalar(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> float:
    """Golden-section search for the maximiser of a unimodal ``f`` on
    ``[lo, hi]``. The returned point is within ``tol`` of the maximiser.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")

    def evaluate(x):
        v = float(f(x))
        # -inf marks an infeasible trial point; NaN and +inf are bugs
        if math.isnan(v) or v == math.inf:
            raise ValueError(f"objective is {v} at x={x!r}")
        return v

    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    e = a + _GOLDEN * (b - a)
    fc, fe = evaluate(c), evaluate(e)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fe:
            b, e, fe = e, c, fc
            c = b - _GOLDEN * (b - a)
            fc = evaluate(c)
        else:
            a, c, fc = c, e, fe
            e = a + _GOLDEN * (b - a)
            fe = evaluate(e)
    # the boundary points are never evaluated by the interior probes
    best = 0.5 * (a + b)
    candidates = [(evaluate(best), best)]
    if a == lo:
        candidates.append((evaluate(lo), lo))
    if b == hi:
        candidates.append((evaluate(hi), hi))
    return max(candidates, key=lambda t: t[0])[1]

"""Yeo-Johnson power transform, standard scaling and rank utilities.

The transform is fitted column by column on training rows only and then
reused unchanged on held-out rows.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import rankdata
from sklearn.base import BaseEstimator, OneToOneFeatureMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_matrix, check_n_features
from .solvers import maximize_scalar

LAMBDA_BOUNDS = (-5.0, 5.0)
LAMBDA_TOL = 1e-6
LAMBDA_MAX_ITER = 200
MODES = ("yj-then-scale", "scale-only")
_BRANCH_EPS = 1e-12


def yeo_johnson_apply(y, lam: float):
    """Yeo-Johnson transform of ``y`` (scalar or array) with power ``lam``."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    pos = y >= 0
    neg = ~pos
    yp = y[pos]
    if abs(lam) < _BRANCH_EPS:
        out[pos] = np.log1p(yp)
    else:
        out[pos] = np.expm1(lam * np.log1p(yp)) / lam
    yn = -y[neg]
    if abs(2.0 - lam) < _BRANCH_EPS:
        out[neg] = -np.log1p(yn)
    else:
        out[neg] = -np.expm1((2.0 - lam) * np.log1p(yn)) / (2.0 - lam)
    if out.ndim == 0:
        return float(out)
    return out


def yeo_johnson_loglik(column, lam: float) -> float:
    """Profile Gaussian log-likelihood of the transformed column plus the
    log-Jacobian of the transform (additive constants dropped)."""
    x = np.asarray(column, dtype=float)
    n = x.shape[0]
    t = yeo_johnson_apply(x, lam)
    var = np.var(t)
    if var <= 0 or not np.isfinite(var):
        return -np.inf
    jac = (lam - 1.0) * np.sum(np.sign(x) * np.log1p(np.abs(x)))
    return -0.5 * n * np.log(var) + jac


def _is_constant(x) -> bool:
    return x.size == 0 or np.ptp(x) == 0


def fit_yeo_johnson(column, tol: float = LAMBDA_TOL) -> float:
    """Maximum-likelihood power parameter by golden-section search on
    ``[-5, 5]``. A constant column gets ``1.0`` and a warning."""
    x = np.asarray(column, dtype=float).ravel()
    if x.shape[0] < 2 or _is_constant(x):
        warnings.warn(
            "constant column; using Yeo-Johnson lambda = 1", RuntimeWarning, stacklevel=2
        )
        return 1.0
    lo, hi = LAMBDA_BOUNDS
    return maximize_scalar(
        lambda lam: yeo_johnson_loglik(x, lam), lo, hi, tol=tol, max_iter=LAMBDA_MAX_ITER
    )


@dataclass(frozen=True)
class ScalerParams:
    means: np.ndarray
    sds: np.ndarray


@dataclass(frozen=True)
class YeoJohnsonParams:
    lambdas: np.ndarray


@dataclass(frozen=True)
class FittedTransform:
    scaler: ScalerParams
    yj: Optional[YeoJohnsonParams] = None
    mode: str = "scale-only"

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "lambdas": None if self.yj is None else [float(v) for v in self.yj.lambdas],
            "means": [float(v) for v in self.scaler.means],
            "sds": [float(v) for v in self.scaler.sds],
        }


def _zero_variance(sds, means):
    return sds <= 1e-12 * np.maximum(1.0, np.abs(means))


def fit_standard_scaler(X) -> ScalerParams:
    """Column means and population standard deviations; zero-variance
    columns get sd 1."""
    X = as_matrix(X, min_samples=2)
    means = X.mean(axis=0)
    sds = X.std(axis=0)
    sds = np.where(_zero_variance(sds, means), 1.0, sds)
    return ScalerParams(means=means, sds=sds)


def apply_standard_scaler(params: ScalerParams, X) -> np.ndarray:
    X = as_matrix(X)
    if X.shape[1] != params.means.shape[0]:
        raise ValueError(
            f"X has {X.shape[1]} columns, scaler was fitted on {params.means.shape[0]}"
        )
    return (X - params.means) / params.sds


def rank_transform(column) -> np.ndarray:
    """Ranks starting at 1; tied values share their average rank."""
    return rankdata(np.asarray(column, dtype=float), method="average")


@dataclass(frozen=True)
class RankMap:
    """Distinct training values (ascending) and their average ranks."""

    values: np.ndarray
    ranks: np.ndarray

    @classmethod
    def from_column(cls, column) -> "RankMap":
        x = np.asarray(column, dtype=float).ravel()
        if x.size == 0:
            raise ValueError("cannot build a rank map from an empty column")
        ranks = rank_transform(x)
        values, first = np.unique(x, return_index=True)
        return cls(values=values, ranks=ranks[first])

    def value_to_rank(self, values) -> np.ndarray:
        """Piecewise-linear value -> rank, clamped to the training range."""
        if self.values.size == 1:
            return np.full(np.shape(values), self.ranks[0])
        return np.interp(values, self.values, self.ranks)


def interpolate_rank_to_value(rank_map: RankMap, predicted_rank):
    """Piecewise-linear rank -> value through the training (value, rank)
    pairs, clamped to the boundary values outside the training ranks."""
    if rank_map.values.size == 0:
        raise ValueError("empty rank map")
    out = np.interp(predicted_rank, rank_map.ranks, rank_map.values)
    return float(out) if np.ndim(out) == 0 else out


def fit_pipeline(train, mode: str = "yj-then-scale") -> FittedTransform:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    X = as_matrix(train, min_samples=2)
    yj = None
    if mode == "yj-then-scale":
        # extreme trial powers may overflow; the search treats those as -inf
        with np.errstate(over="ignore", invalid="ignore"):
            lambdas = np.array([fit_yeo_johnson(X[:, j]) for j in range(X.shape[1])])
        yj = YeoJohnsonParams(lambdas=lambdas)
        X = _apply_yj(yj, X)
    return FittedTransform(scaler=fit_standard_scaler(X), yj=yj, mode=mode)


def _apply_yj(yj: YeoJohnsonParams, X):
    return np.column_stack([yeo_johnson_apply(X[:, j], lam) for j, lam in enumerate(yj.lambdas)])


def apply_pipeline(fitted: FittedTransform, X) -> np.ndarray:
    X = as_matrix(X)
    if X.shape[1] != fitted.scaler.means.shape[0]:
        raise ValueError(
            f"X has {X.shape[1]} columns, transform was fitted on {fitted.scaler.means.shape[0]}"
        )
    if fitted.yj is not None:
        X = _apply_yj(fitted.yj, X)
    return apply_standard_scaler(fitted.scaler, X)


class AbundanceTransformer(OneToOneFeatureMixin, TransformerMixin, BaseEstimator):
    """Column-wise Yeo-Johnson transform followed by standard scaling.

    Parameters
    ----------
    mode : {"yj-then-scale", "scale-only"}
        Whether to apply the power transform before scaling.

    Attributes
    ----------
    lambdas_ : ndarray of shape (n_features,) or None
    mean_, scale_ : ndarray of shape (n_features,)
        Scaling parameters, computed on the (power-transformed) training data.
    """

    def __init__(self, mode: str = "yj-then-scale"):
        self.mode = mode

    def fit(self, X, y=None):
        X = as_matrix(X, min_samples=2)
        self.fitted_ = fit_pipeline(X, self.mode)
        self.n_features_in_ = X.shape[1]
        self.lambdas_ = None if self.fitted_.yj is None else self.fitted_.yj.lambdas
        self.mean_ = self.fitted_.scaler.means
        self.scale_ = self.fitted_.scaler.sds
        return self

    def transform(self, X):
        check_is_fitted(self, "fitted_")
        X = as_matrix(X)
        check_n_features(self, X)
        return apply_pipeline(self.fitted_, X)

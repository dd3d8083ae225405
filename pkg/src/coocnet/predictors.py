"""Predict one held-out taxon from the others.

Each family has plain model records with functional fit/predict operations
and an estimator class wrapping them in the scikit-learn style::

    est = GGMPredictor(random_state=0).fit(X_train)
    y_hat = est.predict(X_test, target=2)

``fit`` runs the inner subtrain/validation split to pick the sparsity
hyper-parameter, then refits on all rows it was given.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_matrix, check_n_features, check_target
from .solvers import (
    GLASSO_MAX_ITERS,
    GLASSO_TOL,
    LASSO_MAX_SWEEPS,
    LASSO_TOL,
    _is_pd,
    default_lambda_grid,
    graphical_lasso,
    lasso_cd,
    lasso_lambda_max,
    lasso_path,
)
from .splits import DEFAULT_INNER_FRACTION, inner_split
from .transform import RankMap, interpolate_rank_to_value, rank_transform

FAMILIES = ("featureless", "pearson", "spearman", "lasso", "ggm")
SELECTIONS = ("validation-loglik", "validation-mse")
DEFAULT_THRESHOLDS = np.linspace(0.0, 1.0, 50, endpoint=False)
GGM_N_LAMBDAS = 20
GGM_LAMBDA_EPS = 1e-2
_DEGENERATE_SD = 1e-12


def _mse(a, b) -> float:
    d = np.asarray(a) - np.asarray(b)
    return float(np.mean(d * d))


def _pick_min(losses, prefer_last=False) -> int:
    """Index of the smallest loss. Exact ties go to the sparser end of the
    grid: the last index for ascending thresholds, the first for
    descending penalties."""
    losses = np.asarray(losses, dtype=float)
    best = np.nanmin(losses)
    hits = np.flatnonzero(losses == best)
    return int(hits[-1] if prefer_last else hits[0])


# --------------------------------------------------------------------------
# featureless baseline


def fit_featureless(train) -> np.ndarray:
    return as_matrix(train).mean(axis=0)


def predict_featureless(means, target: int, rows) -> np.ndarray:
    X = as_matrix(rows)
    return np.full(X.shape[0], means[target])


# --------------------------------------------------------------------------
# correlation families


@dataclass(frozen=True)
class CorrelationModel:
    """Correlation matrix of the fitted representation (values for Pearson,
    average ranks for Spearman) plus the per-column moments needed for
    pairwise conditional-mean prediction."""

    family: str
    corr: np.ndarray
    means: np.ndarray
    sds: np.ndarray
    rank_maps: Optional[tuple] = None
    threshold: Optional[float] = None
    value_means: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.value_means is None:
            object.__setattr__(self, "value_means", self.means)

    @property
    def degenerate(self) -> np.ndarray:
        return self.sds <= _DEGENERATE_SD


def correlation_matrix(X) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pearson correlations (population moments); zero-variance columns get
    zero correlation with everything else."""
    X = as_matrix(X)
    means = X.mean(axis=0)
    centred = X - means
    sds = np.sqrt(np.mean(centred * centred, axis=0))
    ok = sds > _DEGENERATE_SD * np.maximum(1.0, np.abs(means))
    safe = np.where(ok, sds, 1.0)
    corr = (centred.T @ centred) / X.shape[0] / np.outer(safe, safe)
    corr[~ok, :] = 0.0
    corr[:, ~ok] = 0.0
    corr = np.clip(0.5 * (corr + corr.T), -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr, means, np.where(ok, sds, 0.0)


def fit_correlation(train, family: str = "pearson") -> CorrelationModel:
    if family not in ("pearson", "spearman"):
        raise ValueError(f"correlation family must be pearson or spearman, got {family!r}")
    X = as_matrix(train, min_samples=3)
    if family == "pearson":
        corr, means, sds = correlation_matrix(X)
        return CorrelationModel("pearson", corr, means, sds)
    R = np.column_stack([rank_transform(X[:, j]) for j in range(X.shape[1])])
    corr, means, sds = correlation_matrix(R)
    maps = tuple(RankMap.from_column(X[:, j]) for j in range(X.shape[1]))
    return CorrelationModel(
        "spearman", corr, means, sds, rank_maps=maps, value_means=X.mean(axis=0)
    )


def active_set(model: CorrelationModel, target: int, threshold: float) -> np.ndarray:
    """Predictor columns whose |correlation| with ``target`` reaches the
    threshold; zero-variance columns never qualify."""
    c = np.abs(model.corr[target])
    mask = c >= threshold
    mask[target] = False
    mask &= ~model.degenerate
    return np.flatnonzero(mask)


def _model_scale(model: CorrelationModel, X) -> np.ndarray:
    """Test rows in the scale the correlations were computed on."""
    if model.family == "pearson":
        return X
    return np.column_stack([m.value_to_rank(X[:, j]) for j, m in enumerate(model.rank_maps)])


def _pairwise_predictions(model: CorrelationModel, target: int, Z) -> np.ndarray:
    """Column k holds the bivariate conditional-mean prediction of
    ``target`` from predictor k alone (rows x D, model scale)."""
    sds = np.where(model.degenerate, 1.0, model.sds)
    slope = model.corr[target] * model.sds[target] / sds
    return model.means[target] + (Z - model.means) * slope


def _from_model_scale(model: CorrelationModel, target: int, pred) -> np.ndarray:
    if model.family == "pearson":
        return pred
    return interpolate_ranks(model, target, pred)


def interpolate_ranks(model: CorrelationModel, target: int, ranks) -> np.ndarray:
    return np.asarray(interpolate_rank_to_value(model.rank_maps[target], ranks), dtype=float)


def predict_correlation(model: CorrelationModel, threshold: float, target: int, rows) -> np.ndarray:
    """Mean of the pairwise predictions over the above-threshold predictors;
    the training mean when none qualify. Spearman works on ranks and maps
    the predicted rank back to a value."""
    X = as_matrix(rows)
    if X.shape[1] != model.corr.shape[0]:
        raise ValueError(
            f"rows have {X.shape[1]} columns, model was fitted on {model.corr.shape[0]}"
        )
    if not 0.0 <= threshold:
        raise ValueError("threshold must be non-negative")
    Z = _model_scale(model, X)
    active = active_set(model, target, threshold)
    if active.size == 0:
        return np.full(X.shape[0], model.value_means[target])
    pred = _pairwise_predictions(model, target, Z)[:, active].mean(axis=1)
    return _from_model_scale(model, target, pred)


def threshold_curve(model: CorrelationModel, val, grid) -> np.ndarray:
    """Mean validation MSE over all target taxa for every grid threshold."""
    X = as_matrix(val)
    Z = _model_scale(model, X)
    d = X.shape[1]
    grid = np.asarray(grid, dtype=float)
    losses = np.zeros((grid.size, d))
    for j in range(d):
        pairwise = _pairwise_predictions(model, j, Z)
        for g, t in enumerate(grid):
            active = active_set(model, j, t)
            if active.size == 0:
                pred = np.full(X.shape[0], model.value_means[j])
            else:
                pred = _from_model_scale(model, j, pairwise[:, active].mean(axis=1))
            losses[g, j] = _mse(pred, X[:, j])
    return losses.mean(axis=1)


def train_threshold(model: CorrelationModel, val, grid=DEFAULT_THRESHOLDS) -> tuple[float, np.ndarray]:
    """Grid threshold with the smallest mean validation MSE (ties go to the
    larger threshold). Returns ``(threshold, curve)``."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty threshold grid")
    if np.any((grid < 0) | (grid > 1)):
        raise ValueError("threshold grid values must lie in [0, 1]")
    order = np.argsort(grid, kind="stable")
    curve = threshold_curve(model, val, grid[order])
    best = _pick_min(curve, prefer_last=True)
    inverse = np.empty_like(order)
    inverse[order] = np.arange(order.size)
    return float(grid[order][best]), curve[inverse]


# --------------------------------------------------------------------------
# LASSO


@dataclass(frozen=True)
class LassoTargetFit:
    target: int
    coef: np.ndarray  # length D, zero at the target index
    intercept: float
    lam: float
    grid: np.ndarray
    validation_curve: np.ndarray
    converged: bool


@dataclass(frozen=True)
class LassoModel:
    fits: tuple

    @property
    def coef_matrix(self) -> np.ndarray:
        """Row j holds the coefficients of the target-j regression."""
        return np.vstack([f.coef for f in self.fits])


def _others(d, j):
    return np.flatnonzero(np.arange(d) != j)


def _lasso_validation(Xs, Xv, j, grid, tol, max_sweeps):
    cols = _others(Xs.shape[1], j)
    fits = lasso_path(Xs[:, cols], Xs[:, j], grid, tol=tol, max_sweeps=max_sweeps)
    losses = np.array(
        [_mse(f.intercept + Xv[:, cols] @ f.weights, Xv[:, j]) for f in fits]
    )
    return fits, losses


def _lasso_refit(X, j, lam, init, tol, max_sweeps):
    cols = _others(X.shape[1], j)
    fit = lasso_cd(X[:, cols], X[:, j], lam, init=init, tol=tol, max_sweeps=max_sweeps)
    coef = np.zeros(X.shape[1])
    coef[cols] = fit.weights
    return coef, fit.intercept, fit.converged


def fit_lasso_predictor(
    train,
    target: int,
    grid: Optional[Sequence[float]] = None,
    split=None,
    tol: float = LASSO_TOL,
    max_sweeps: int = LASSO_MAX_SWEEPS,
) -> LassoTargetFit:
    """Select the penalty on the inner split, then refit on all of ``train``.

    ``split`` is a ``(subtrain_rows, validation_rows)`` pair; by default a
    seed-0 75/25 split. Without ``grid`` the default path for the subtrain
    rows is used.
    """
    X = as_matrix(train, min_samples=4)
    sub, val = split if split is not None else inner_split(X.shape[0])
    if len(sub) == 0 or len(val) == 0:
        raise ValueError("degenerate inner split: empty subtrain or validation set")
    Xs, Xv = X[sub], X[val]
    cols = _others(X.shape[1], target)
    if grid is None:
        grid = default_lambda_grid(lasso_lambda_max(Xs[:, cols], Xs[:, target]))
    grid = np.asarray(grid, dtype=float)
    fits, losses = _lasso_validation(Xs, Xv, target, grid, tol, max_sweeps)
    best = _pick_min(losses)
    coef, intercept, conv = _lasso_refit(X, target, grid[best], fits[best].weights, tol, max_sweeps)
    return LassoTargetFit(target, coef, intercept, float(grid[best]), grid, losses, conv)


def predict_lasso(model: LassoModel, target: int, rows) -> np.ndarray:
    X = as_matrix(rows)
    fit = model.fits[target]
    if X.shape[1] != fit.coef.shape[0]:
        raise ValueError(f"rows have {X.shape[1]} columns, model expects {fit.coef.shape[0]}")
    return fit.intercept + X @ fit.coef


# --------------------------------------------------------------------------
# Gaussian graphical model


@dataclass(frozen=True)
class GgmModel:
    precision: np.ndarray
    lam: float
    location: Optional[np.ndarray] = None
    grid: Optional[np.ndarray] = None
    validation_curve: Optional[np.ndarray] = None

    def __post_init__(self):
        loc = self.location
        if loc is None:
            loc = np.zeros(self.precision.shape[0])
        object.__setattr__(self, "location", np.asarray(loc, dtype=float))


def sample_covariance(X, location=None):
    """``S = (X - mu)'(X - mu) / N``; zero-variance columns are given unit
    variance and no covariance so the penalised problem stays well posed."""
    X = as_matrix(X)
    mu = X.mean(axis=0) if location is None else location
    C = X - mu
    S = C.T @ C / X.shape[0]
    bad = np.diag(S) <= _DEGENERATE_SD
    if bad.any():
        S[bad, :] = 0.0
        S[:, bad] = 0.0
        S[bad, bad] = 1.0
    return S, mu


def ggm_lambda_grid(S, n_lambdas: int = GGM_N_LAMBDAS, eps: float = GGM_LAMBDA_EPS):
    """Descending grid from the smallest penalty giving a diagonal estimate."""
    off = np.abs(S - np.diag(np.diag(S)))
    lam_max = float(off.max())
    if lam_max <= 0:
        lam_max = 1.0
    return np.geomspace(lam_max, lam_max * eps, n_lambdas)


def gaussian_nll(S_val, precision) -> float:
    """``tr(S_val Theta) - log det Theta`` (validation loss, lower is better)."""
    try:
        L = np.linalg.cholesky(precision)
    except np.linalg.LinAlgError:
        return math.inf
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    return float(np.sum(S_val * precision)) - logdet


def conditional_mean(precision, location, target: int, X) -> np.ndarray:
    """Gaussian conditional mean of one coordinate given the rest, written
    with both half-sums over the off-diagonal precision entries."""
    w_jj = precision[target, target]
    if not w_jj > 0:
        raise ValueError(f"precision diagonal entry {target} is not positive ({w_jj})")
    others = _others(precision.shape[0], target)
    C = X[:, others] - location[others]
    row_sum = C @ precision[others, target]
    col_sum = C @ precision[target, others]
    return location[target] - (row_sum + col_sum) / (2.0 * w_jj)


def predict_ggm(model: GgmModel, target: int, rows) -> np.ndarray:
    X = as_matrix(rows)
    P = model.precision
    if X.shape[1] != P.shape[0]:
        raise ValueError(f"rows have {X.shape[1]} columns, model expects {P.shape[0]}")
    if np.max(np.abs(P - P.T)) > 1e-10 * max(1.0, np.max(np.abs(P))):
        raise ValueError("precision matrix is not symmetric")
    return conditional_mean(P, model.location, target, X)


def _ggm_mse(precision, location, X) -> float:
    return float(
        np.mean(
            [_mse(conditional_mean(precision, location, j, X), X[:, j]) for j in range(X.shape[1])]
        )
    )


def _usable_precision(P):
    return bool(np.all(np.isfinite(P))) and _is_pd(P)


def fit_ggm(
    train,
    grid: Optional[Sequence[float]] = None,
    selection: str = "validation-loglik",
    split=None,
    tol: float = GLASSO_TOL,
    max_iters: int = GLASSO_MAX_ITERS,
) -> GgmModel:
    """Pick the graphical-lasso penalty on the inner split and refit.

    ``validation-loglik`` minimises the held-out Gaussian negative
    log-likelihood; ``validation-mse`` minimises the mean squared error of
    the conditional-mean predictions over all taxa.
    """
    if selection not in SELECTIONS:
        raise ValueError(f"selection must be one of {SELECTIONS}, got {selection!r}")
    X = as_matrix(train, min_samples=4, min_features=2)
    sub, val = split if split is not None else inner_split(X.shape[0])
    if len(sub) == 0 or len(val) == 0:
        raise ValueError("degenerate inner split: empty subtrain or validation set")
    S_sub, mu_sub = sample_covariance(X[sub])
    if grid is None:
        grid = ggm_lambda_grid(S_sub)
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < 0):
        raise ValueError("lambda grid must be non-negative")
    Xv = X[val]
    S_val, _ = sample_covariance(Xv, location=mu_sub)
    losses = np.full(grid.size, np.inf)
    for g, lam in enumerate(grid):
        fit = graphical_lasso(S_sub, lam, tol=tol, max_iters=max_iters)
        if not _usable_precision(fit.precision):
            continue
        if selection == "validation-loglik":
            losses[g] = gaussian_nll(S_val, fit.precision)
        else:
            losses[g] = _ggm_mse(fit.precision, mu_sub, Xv)
    if not np.any(np.isfinite(losses)):
        raise np.linalg.LinAlgError("graphical lasso failed for every penalty in the grid")
    best = _pick_min(losses)
    S, mu = sample_covariance(X)
    final = graphical_lasso(S, grid[best], tol=tol, max_iters=max_iters)
    if not _usable_precision(final.precision):
        raise np.linalg.LinAlgError(
            f"graphical lasso refit at lambda={grid[best]:.4g} is not positive definite"
        )
    return GgmModel(final.precision, float(grid[best]), mu, grid, losses)


# --------------------------------------------------------------------------
# estimators


class _TaxonPredictor(BaseEstimator):
    """Shared plumbing: ``predict(X, target)`` predicts column ``target``
    of ``X`` from its other columns (the target column itself is ignored)."""

    def _split(self, n):
        return inner_split(n, self.inner_fraction, self.random_state)

    def _check(self, X):
        check_is_fitted(self, "n_features_in_")
        X = as_matrix(X)
        check_n_features(self, X)
        return X

    def predict_all(self, X) -> np.ndarray:
        X = self._check(X)
        return np.column_stack([self.predict(X, j) for j in range(X.shape[1])])

    def score_mse(self, X) -> np.ndarray:
        """Per-taxon MSE of the held-out predictions on ``X``."""
        X = self._check(X)
        return np.array([_mse(self.predict(X, j), X[:, j]) for j in range(X.shape[1])])


class FeaturelessPredictor(_TaxonPredictor):
    """Predicts the training mean of the target column."""

    family = "featureless"

    def fit(self, X, y=None):
        X = as_matrix(X)
        self.means_ = fit_featureless(X)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X, target):
        X = self._check(X)
        return predict_featureless(self.means_, check_target(self, target), X)


class CorrelationPredictor(_TaxonPredictor):
    """Pearson or Spearman pairwise prediction with a trained threshold.

    Parameters
    ----------
    method : {"pearson", "spearman"}
    threshold : float, optional
        Fixed cutoff. When None the cutoff is chosen from ``thresholds`` by
        mean validation MSE on an inner split.
    thresholds : array-like, optional
        Candidate cutoffs in [0, 1]; 50 evenly spaced values in [0, 1) by
        default.
    """

    def __init__(
        self,
        method: str = "pearson",
        threshold: Optional[float] = None,
        thresholds=None,
        inner_fraction: float = DEFAULT_INNER_FRACTION,
        random_state: int = 0,
    ):
        self.method = method
        self.threshold = threshold
        self.thresholds = thresholds
        self.inner_fraction = inner_fraction
        self.random_state = random_state

    @property
    def family(self):
        return self.method

    def fit(self, X, y=None):
        X = as_matrix(X, min_samples=3)
        grid = DEFAULT_THRESHOLDS if self.thresholds is None else np.asarray(self.thresholds, float)
        if self.threshold is None:
            sub, val = self._split(X.shape[0])
            inner = fit_correlation(X[sub], self.method)
            self.threshold_, self.validation_curve_ = train_threshold(inner, X[val], grid)
            self.thresholds_ = grid
        else:
            self.threshold_ = float(self.threshold)
            self.validation_curve_ = None
        model = fit_correlation(X, self.method)
        self.model_ = dataclasses.replace(model, threshold=self.threshold_)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X, target):
        X = self._check(X)
        return predict_correlation(self.model_, self.threshold_, check_target(self, target), X)


class LassoPredictor(_TaxonPredictor):
    """One LASSO regression per target taxon on all other taxa.

    Parameters
    ----------
    lambdas : array-like, optional
        Shared descending penalty grid. By default each target uses 100
        log-spaced values from its own ``lambda_max`` down by ``1e-3``.
    lambda_scope : {"per-target", "global"}
        Select one penalty per target, or one penalty index shared by all
        targets (minimising the mean validation MSE).
    """

    family = "lasso"

    def __init__(
        self,
        lambdas=None,
        lambda_scope: str = "per-target",
        inner_fraction: float = DEFAULT_INNER_FRACTION,
        random_state: int = 0,
        tol: float = LASSO_TOL,
        max_sweeps: int = LASSO_MAX_SWEEPS,
    ):
        self.lambdas = lambdas
        self.lambda_scope = lambda_scope
        self.inner_fraction = inner_fraction
        self.random_state = random_state
        self.tol = tol
        self.max_sweeps = max_sweeps

    def fit(self, X, y=None):
        X = as_matrix(X, min_samples=4, min_features=2)
        d = X.shape[1]
        split = self._split(X.shape[0])
        if self.lambda_scope == "per-target":
            fits = tuple(
                fit_lasso_predictor(X, j, self.lambdas, split, self.tol, self.max_sweeps)
                for j in range(d)
            )
        elif self.lambda_scope == "global":
            fits = self._fit_global(X, split)
        else:
            raise ValueError(f"lambda_scope must be per-target or global, got {self.lambda_scope!r}")
        self.model_ = LassoModel(fits)
        self.coef_ = self.model_.coef_matrix
        self.intercept_ = np.array([f.intercept for f in fits])
        self.lambda_ = np.array([f.lam for f in fits])
        self.n_features_in_ = d
        return self

    def _fit_global(self, X, split):
        sub, val = split
        Xs, Xv = X[sub], X[val]
        d = X.shape[1]
        grid = self.lambdas
        if grid is None:
            lam_max = max(lasso_lambda_max(Xs[:, _others(d, j)], Xs[:, j]) for j in range(d))
            grid = default_lambda_grid(lam_max)
        grid = np.asarray(grid, dtype=float)
        paths = [_lasso_validation(Xs, Xv, j, grid, self.tol, self.max_sweeps) for j in range(d)]
        best = _pick_min(np.mean([losses for _, losses in paths], axis=0))
        fits = []
        for j, (path, losses) in enumerate(paths):
            coef, b0, conv = _lasso_refit(X, j, grid[best], path[best].weights, self.tol, self.max_sweeps)
            fits.append(LassoTargetFit(j, coef, b0, float(grid[best]), grid, losses, conv))
        return tuple(fits)

    def predict(self, X, target):
        X = self._check(X)
        return predict_lasso(self.model_, check_target(self, target), X)


class GGMPredictor(_TaxonPredictor):
    """Graphical-lasso precision matrix with conditional-mean prediction.

    Parameters
    ----------
    lambdas : array-like, optional
        Descending penalty grid; by default 20 log-spaced values from the
        largest absolute off-diagonal subtrain covariance down by ``1e-2``.
    selection : {"validation-loglik", "validation-mse"}
    """

    family = "ggm"

    def __init__(
        self,
        lambdas=None,
        selection: str = "validation-loglik",
        inner_fraction: float = DEFAULT_INNER_FRACTION,
        random_state: int = 0,
        tol: float = GLASSO_TOL,
        max_iters: int = GLASSO_MAX_ITERS,
    ):
        self.lambdas = lambdas
        self.selection = selection
        self.inner_fraction = inner_fraction
        self.random_state = random_state
        self.tol = tol
        self.max_iters = max_iters

    def fit(self, X, y=None):
        X = as_matrix(X, min_samples=4, min_features=2)
        self.model_ = fit_ggm(
            X,
            self.lambdas,
            self.selection,
            self._split(X.shape[0]),
            tol=self.tol,
            max_iters=self.max_iters,
        )
        self.precision_ = self.model_.precision
        self.location_ = self.model_.location
        self.lambda_ = self.model_.lam
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X, target):
        X = self._check(X)
        return predict_ggm(self.model_, check_target(self, target), X)


@dataclass(frozen=True)
class PredictorSpec:
    """Declarative description of one algorithm configuration."""

    family: str
    thresholds: Optional[tuple] = None
    lambdas: Optional[tuple] = None
    selection: str = "validation-loglik"
    lambda_scope: str = "per-target"
    inner_fraction: float = DEFAULT_INNER_FRACTION
    name: Optional[str] = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.thresholds is not None:
            t = np.asarray(self.thresholds, dtype=float)
            if np.any((t < 0) | (t > 1)):
                raise ValueError("correlation thresholds must lie in [0, 1]")
        if self.lambdas is not None:
            lam = np.asarray(self.lambdas, dtype=float)
            if np.any(lam <= 0) or np.any(np.diff(lam) >= 0):
                raise ValueError("lambda grids must be strictly positive and descending")
        if self.selection not in SELECTIONS:
            raise ValueError(f"selection must be one of {SELECTIONS}")

    @property
    def label(self) -> str:
        return self.name or self.family

    def build(self, random_state: int = 0) -> _TaxonPredictor:
        if self.family == "featureless":
            return FeaturelessPredictor()
        if self.family in ("pearson", "spearman"):
            return CorrelationPredictor(
                self.family,
                threshold=self.options.get("threshold"),
                thresholds=self.thresholds,
                inner_fraction=self.inner_fraction,
                random_state=random_state,
            )
        if self.family == "lasso":
            return LassoPredictor(
                self.lambdas,
                lambda_scope=self.lambda_scope,
                inner_fraction=self.inner_fraction,
                random_state=random_state,
            )
        return GGMPredictor(
            self.lambdas,
            selection=self.selection,
            inner_fraction=self.inner_fraction,
            random_state=random_state,
        )

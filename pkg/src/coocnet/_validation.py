"""Input coercion shared by the estimators."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .otu_io import OtuTable


def as_matrix(X, min_samples: int = 1, min_features: int = 1) -> np.ndarray:
    """Return a finite float64 2-D array from an array-like or OtuTable."""
    if isinstance(X, OtuTable):
        X = X.counts
    return check_array(
        X,
        dtype=np.float64,
        ensure_min_samples=min_samples,
        ensure_min_features=min_features,
        copy=False,
    )


def check_n_features(estimator, X) -> None:
    expected = estimator.n_features_in_
    if X.shape[1] != expected:
        raise ValueError(
            f"X has {X.shape[1]} columns but {type(estimator).__name__} "
            f"was fitted with {expected}"
        )


def check_target(estimator, target) -> int:
    d = estimator.n_features_in_
    j = int(target)
    if not 0 <= j < d:
        raise IndexError(f"target index {target} out of range for {d} taxa")
    return j

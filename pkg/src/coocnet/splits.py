"""Seeded sample partitions: outer folds and the inner subtrain/validation split."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_INNER_FRACTION = 0.75


@dataclass(frozen=True, eq=False)
class FoldPlan:
    """Fold IDs in ``1..k`` for each of ``n`` samples."""

    assignments: np.ndarray
    k: int
    seed: int

    @property
    def n(self) -> int:
        return self.assignments.shape[0]

    def train_test(self, fold: int):
        test = np.flatnonzero(self.assignments == fold)
        train = np.flatnonzero(self.assignments != fold)
        return train, test

    def __eq__(self, other):
        if not isinstance(other, FoldPlan):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.assignments, other.assignments)


def make_folds(n: int, k: int = 3, seed: int = 0) -> FoldPlan:
    """Deal a seeded permutation of ``range(n)`` round-robin into ``k`` folds."""
    if k < 2:
        raise ValueError(f"need k >= 2 folds, got {k}")
    if n < k:
        raise ValueError(f"cannot split {n} samples into {k} folds")
    perm = np.random.default_rng(seed).permutation(n)
    assignments = np.empty(n, dtype=int)
    assignments[perm] = np.arange(n) % k + 1
    return FoldPlan(assignments=assignments, k=k, seed=seed)


def inner_split(n: int, fraction: float = DEFAULT_INNER_FRACTION, seed: int = 0):
    """Seeded (subtrain, validation) row indices, both sorted and non-empty."""
    if not 0 < fraction < 1:
        raise ValueError(f"inner split fraction must be in (0, 1), got {fraction}")
    n_val = int(round((1.0 - fraction) * n))
    n_val = min(max(n_val, 1), n - 1)
    if n < 2 or n - n_val < 1:
        raise ValueError(f"cannot split {n} rows into subtrain and validation sets")
    perm = np.random.default_rng(seed).permutation(n)
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])

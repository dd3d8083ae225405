"""Cross-validated test error for network inference algorithms.

For each outer fold the transform is fitted on the training rows, every
algorithm picks its hyper-parameter on an inner subtrain/validation split
of those rows and is refitted on all of them, and each taxon in turn is
predicted on the held-out fold from the remaining taxa.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, fields
from typing import Iterable, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from .otu_io import OtuTable, subsample
from .predictors import PredictorSpec
from .splits import FoldPlan, inner_split, make_folds
from .transform import apply_pipeline, fit_pipeline

logger = logging.getLogger(__name__)

DEFAULT_K = 3
DEFAULT_REPLICATES = 3


@dataclass(frozen=True)
class EvalRecord:
    dataset: str
    algorithm: str
    n: int
    replicate: int
    fold: int
    target: int
    taxon: str
    mse: float
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error

    @property
    def key(self):
        return (self.dataset, self.algorithm, self.n, self.replicate, self.fold, self.target)


@dataclass(frozen=True)
class SummaryRow:
    algorithm: str
    n: int
    mean_mse: float
    var_mse: float
    count: int
    n_errors: int


def _record_key(r: EvalRecord):
    return r.key


RECORD_FIELDS = [f.name for f in fields(EvalRecord)]
SUMMARY_FIELDS = [f.name for f in fields(SummaryRow)]


def derive_seed(master_seed: int, *keys: int) -> int:
    """Stable 32-bit seed for a work item, independent of execution order."""
    seq = np.random.SeedSequence([int(master_seed), *(int(k) for k in keys)])
    return int(seq.generate_state(1)[0])


@dataclass
class FoldResult:
    algorithm: str
    fold: int
    records: list
    model: object = None
    transform: object = None


def _run_fold(table, spec, mode, plan, fold, inner_seed, dataset, n, replicate, keep_model):
    train, test = plan.train_test(fold)
    X = table.counts
    records = []
    model = fitted = None
    try:
        fitted = fit_pipeline(X[train], mode)
        Xtr = apply_pipeline(fitted, X[train])
        Xte = apply_pipeline(fitted, X[test])
        model = spec.build(random_state=inner_seed).fit(Xtr)
    except Exception as exc:  # noqa: BLE001 - recorded per taxon below
        msg = f"fit failed: {type(exc).__name__}: {exc}"
        logger.warning("%s fold %d: %s", spec.label, fold, msg)
        for j, taxon in enumerate(table.taxa):
            records.append(EvalRecord(dataset, spec.label, n, replicate, fold, j, taxon, math.nan, msg))
        return FoldResult(spec.label, fold, records)
    for j, taxon in enumerate(table.taxa):
        try:
            pred = model.predict(Xte, j)
            err = float(np.mean((pred - Xte[:, j]) ** 2))
            if not math.isfinite(err):
                raise FloatingPointError("non-finite test MSE")
            records.append(EvalRecord(dataset, spec.label, n, replicate, fold, j, taxon, err))
        except Exception as exc:  # noqa: BLE001
            msg = f"predict failed: {type(exc).__name__}: {exc}"
            logger.warning("%s fold %d taxon %s: %s", spec.label, fold, taxon, msg)
            records.append(EvalRecord(dataset, spec.label, n, replicate, fold, j, taxon, math.nan, msg))
    return FoldResult(
        spec.label, fold, records, model if keep_model else None, fitted if keep_model else None
    )


def _plan_items(table, specs, mode, plan, seed, dataset, n, replicate, keep_models):
    for spec in specs:
        for fold in range(1, plan.k + 1):
            # one inner seed per fold, shared by all algorithms
            inner_seed = derive_seed(seed, n, replicate, fold)
            yield (table, spec, mode, plan, fold, inner_seed, dataset, n, replicate, keep_models)


def _run_items(items, workers):
    items = list(items)
    if workers is None or workers == 1 or len(items) <= 1:
        return [_run_fold(*it) for it in items]
    return Parallel(n_jobs=workers)(delayed(_run_fold)(*it) for it in items)


def evaluate(
    table: OtuTable,
    specs: Sequence[PredictorSpec],
    transform_mode: str = "yj-then-scale",
    plan: Optional[FoldPlan] = None,
    *,
    k: int = DEFAULT_K,
    seed: int = 0,
    dataset: str = "data",
    replicate: int = 0,
    workers: int = 1,
    return_results: bool = False,
):
    """Evaluate several algorithms on one shared fold plan.

    Returns the key-sorted record list, or ``(records, fold_results)`` with
    ``return_results=True`` (fold results keep the fitted models).
    """
    if plan is None:
        plan = make_folds(table.n_samples, k, derive_seed(seed, table.n_samples, replicate, 0))
    if plan.n != table.n_samples:
        raise ValueError(f"fold plan covers {plan.n} samples, table has {table.n_samples}")
    labels = [s.label for s in specs]
    if len(set(labels)) != len(labels):
        raise ValueError(f"algorithm labels must be unique, got {labels}")
    items = _plan_items(
        table, specs, transform_mode, plan, seed, dataset, table.n_samples, replicate, return_results
    )
    results = _run_items(items, workers)
    records = sorted((r for res in results for r in res.records), key=_record_key)
    if return_results:
        return records, results
    return records


def evaluate_algorithm(
    table: OtuTable,
    spec: PredictorSpec,
    transform_mode: str = "yj-then-scale",
    plan: Optional[FoldPlan] = None,
    **kwargs,
):
    """K x D test-error records for a single algorithm."""
    return evaluate(table, [spec], transform_mode, plan, **kwargs)


def default_sizes(n_max: int, step: int = 10) -> list[int]:
    return list(range(step, n_max + 1, step)) or [n_max]


def subsample_curve(
    table: OtuTable,
    sizes: Iterable[int],
    specs: Sequence[PredictorSpec],
    replicates: int = DEFAULT_REPLICATES,
    *,
    transform_mode: str = "yj-then-scale",
    k: int = DEFAULT_K,
    seed: int = 0,
    dataset: str = "data",
    workers: int = 1,
) -> list[EvalRecord]:
    """Test-error records over subsample sizes and replicate draws."""
    sizes = list(sizes)
    for n in sizes:
        if n > table.n_samples:
            raise ValueError(f"subsample size {n} exceeds the {table.n_samples} available samples")
        if n < k + 1:
            raise ValueError(f"subsample size {n} is too small for {k}-fold cross-validation")
    items = []
    for n in sizes:
        for rep in range(replicates):
            sub = subsample(table, n, derive_seed(seed, n, rep))
            plan = make_folds(n, k, derive_seed(seed, n, rep, 0))
            items.extend(_plan_items(sub, specs, transform_mode, plan, seed, dataset, n, rep, False))
    results = _run_items(items, workers)
    return sorted((r for res in results for r in res.records), key=_record_key)


def aggregate(records: Iterable[EvalRecord]) -> list[SummaryRow]:
    """Mean and population variance of test MSE per (algorithm, n);
    error-marked records are excluded and counted."""
    records = list(records)
    if not records:
        raise ValueError("no records to aggregate")
    groups: dict = {}
    for r in records:
        groups.setdefault((r.algorithm, r.n), []).append(r)
    rows = []
    for (alg, n), group in sorted(groups.items()):
        vals = np.array([r.mse for r in group if r.ok])
        n_err = len(group) - vals.size
        if vals.size == 0:
            rows.append(SummaryRow(alg, n, math.nan, math.nan, 0, n_err))
        else:
            rows.append(SummaryRow(alg, n, float(vals.mean()), float(vals.var()), int(vals.size), n_err))
    if all(r.count == 0 for r in rows):
        raise ValueError("every record is error-marked")
    return rows


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def write_records_csv(records: Iterable[EvalRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_FIELDS)
        for r in sorted(records, key=_record_key):
            writer.writerow([_fmt(getattr(r, f)) for f in RECORD_FIELDS])


def read_records_csv(path) -> list[EvalRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            EvalRecord(
                row["dataset"],
                row["algorithm"],
                int(row["n"]),
                int(row["replicate"]),
                int(row["fold"]),
                int(row["target"]),
                row["taxon"],
                float(row["mse"]),
                row["error"],
            )
            for row in csv.DictReader(fh)
        ]


def write_summary_csv(rows: Iterable[SummaryRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_FIELDS)
        for r in rows:
            writer.writerow([_fmt(getattr(r, f)) for f in SUMMARY_FIELDS])


__all__ = [
    "EvalRecord",
    "FoldPlan",
    "SummaryRow",
    "aggregate",
    "derive_seed",
    "evaluate",
    "evaluate_algorithm",
    "inner_split",
    "make_folds",
    "subsample_curve",
    "write_records_csv",
    "write_summary_csv",
]

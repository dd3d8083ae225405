"""Loading, validating, subsampling and simulating abundance tables."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

ORIENTATIONS = ("rows-are-samples", "rows-are-taxa")
_REJECTED_SUFFIXES = {".rdata", ".rda", ".rds", ".biom", ".xlsx", ".xls"}
SYNTHETIC_MAX_RETRIES = 100


class TableFormatError(ValueError):
    """Raised for malformed or unsupported abundance table input."""


@dataclass(frozen=True, eq=False)
class OtuTable:
    """Samples-by-taxa abundance matrix with labels."""

    samples: tuple
    taxa: tuple
    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.float64)
        if counts.ndim != 2:
            raise TableFormatError("counts must be a 2-D matrix")
        object.__setattr__(self, "samples", tuple(str(s) for s in self.samples))
        object.__setattr__(self, "taxa", tuple(str(t) for t in self.taxa))
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        n, d = counts.shape
        if n < 1:
            raise TableFormatError("table needs at least one sample")
        if d < 2:
            raise TableFormatError(f"table needs at least two taxa, got {d}")
        if len(self.samples) != n or len(self.taxa) != d:
            raise TableFormatError(
                f"label lengths ({len(self.samples)} samples, {len(self.taxa)} taxa) "
                f"do not match matrix shape {counts.shape}"
            )
        _check_unique(self.samples, "sample")
        _check_unique(self.taxa, "taxon")

    @property
    def n_samples(self) -> int:
        return self.counts.shape[0]

    @property
    def n_taxa(self) -> int:
        return self.counts.shape[1]

    def take(self, rows) -> "OtuTable":
        rows = np.asarray(rows, dtype=int)
        return OtuTable([self.samples[i] for i in rows], self.taxa, self.counts[rows])

    def __eq__(self, other):
        if not isinstance(other, OtuTable):
            return NotImplemented
        return (
            self.samples == other.samples
            and self.taxa == other.taxa
            and self.counts.shape == other.counts.shape
            and bool(np.array_equal(self.counts, other.counts))
        )


@dataclass(frozen=True)
class ValidationReport:
    zero_variance_columns: list = field(default_factory=list)
    negative_columns: list = field(default_factory=list)
    constant_rows: list = field(default_factory=list)

    @property
    def warnings(self) -> list[str]:
        out = [f"column {j} has zero variance" for j in self.zero_variance_columns]
        out += [f"column {j} contains negative values" for j in self.negative_columns]
        out += [f"row {i} is constant" for i in self.constant_rows]
        return out

    def __bool__(self):
        return bool(self.warnings)


@dataclass(frozen=True, eq=False)
class SyntheticTruth:
    table: OtuTable
    precision: np.ndarray
    support: frozenset


def _check_unique(labels, kind):
    seen = set()
    for label in labels:
        if label in seen:
            raise TableFormatError(f"duplicate {kind} label {label!r}")
        seen.add(label)


def load_otu_csv(path, orientation: str = "rows-are-samples") -> OtuTable:
    """Read a labelled CSV; the result is always samples-by-taxa."""
    path = Path(path)
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}, got {orientation!r}")
    if path.suffix.lower() in _REJECTED_SUFFIXES:
        raise TableFormatError(
            f"{path.name}: only CSV input is supported; convert the table to CSV "
            "(first row = taxon names, first column = sample IDs) before loading"
        )
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2:
        raise TableFormatError(f"{path}: need a header row and at least one data row")
    header = rows[0]
    col_labels = header[1:]
    row_labels = []
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise TableFormatError(
                f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
            )
        row_labels.append(row[0])
        try:
            vals = [float(cell) for cell in row[1:]]
        except ValueError as exc:
            raise TableFormatError(f"{path}:{lineno}: {exc}") from None
        if not all(math.isfinite(v) for v in vals):
            raise TableFormatError(f"{path}:{lineno}: non-finite value")
        values.append(vals)
    matrix = np.array(values, dtype=np.float64).reshape(len(row_labels), len(col_labels))
    if orientation == "rows-are-taxa":
        return OtuTable(col_labels, row_labels, matrix.T)
    return OtuTable(row_labels, col_labels, matrix)


def write_otu_csv(table: OtuTable, path, corner: str = "sample") -> None:
    """Write in rows-are-samples orientation with round-trip float formatting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([corner, *table.taxa])
        for label, row in zip(table.samples, table.counts):
            writer.writerow([label, *(repr(float(v)) for v in row)])


def validate_table(table: OtuTable, raw_counts: bool = True) -> ValidationReport:
    X = table.counts
    zero_var = [int(j) for j in np.flatnonzero(np.ptp(X, axis=0) == 0)]
    negative = [int(j) for j in np.flatnonzero((X < 0).any(axis=0))] if raw_counts else []
    constant_rows = [int(i) for i in np.flatnonzero(np.ptp(X, axis=1) == 0)]
    return ValidationReport(zero_var, negative, constant_rows)


def subsample(table: OtuTable, n: int, seed: int) -> OtuTable:
    """``n`` rows drawn uniformly without replacement."""
    if not 1 <= n <= table.n_samples:
        raise ValueError(f"subsample size must be in [1, {table.n_samples}], got {n}")
    rng = np.random.default_rng(seed)
    rows = rng.choice(table.n_samples, size=n, replace=False)
    return table.take(rows)


def random_sparse_precision(
    d: int, edge_density: float, rng, strength=(0.5, 1.0), margin: float = 0.5
) -> np.ndarray:
    """Symmetric, strictly diagonally dominant precision matrix.

    Exactly ``round(edge_density * d * (d - 1) / 2)`` off-diagonal pairs
    (at least one) get a weight of random sign and magnitude in
    ``strength``; each diagonal entry is its row's absolute off-diagonal
    sum plus ``margin``.
    """
    upper = np.triu_indices(d, k=1)
    n_pairs = len(upper[0])
    n_edges = min(max(int(round(edge_density * n_pairs)), 1), n_pairs)
    pick = np.sort(rng.choice(n_pairs, size=n_edges, replace=False))
    mags = rng.uniform(strength[0], strength[1], size=n_edges)
    signs = rng.choice([-1.0, 1.0], size=n_edges)
    P = np.zeros((d, d))
    P[upper[0][pick], upper[1][pick]] = mags * signs
    P = P + P.T
    np.fill_diagonal(P, np.abs(P).sum(axis=1) + margin)
    return P


def generate_synthetic(
    d: int,
    n: int,
    edge_density: float,
    seed: int,
    counts: bool = False,
) -> SyntheticTruth:
    """Gaussian table drawn from a random sparse precision matrix.

    With ``counts=True`` each value ``v`` becomes ``round(exp(v))``.
    """
    if d < 2 or n < 2:
        raise ValueError(f"need d >= 2 and n >= 2, got d={d}, n={n}")
    if not 0 < edge_density < 1:
        raise ValueError(f"edge_density must be in (0, 1), got {edge_density}")
    rng = np.random.default_rng(seed)
    for _ in range(SYNTHETIC_MAX_RETRIES):
        P = random_sparse_precision(d, edge_density, rng)
        try:
            L = np.linalg.cholesky(P)
        except np.linalg.LinAlgError:
            continue
        break
    else:
        raise ValueError(
            f"no positive-definite precision matrix after {SYNTHETIC_MAX_RETRIES} attempts "
            f"(d={d}, edge_density={edge_density})"
        )
    # x = L^{-T} z has covariance (L L^T)^{-1} = P^{-1}
    Z = rng.standard_normal((n, d))
    X = np.linalg.solve(L.T, Z.T).T
    if counts:
        X = np.round(np.exp(X))
    table = OtuTable(
        [f"s{i + 1}" for i in range(n)],
        [f"taxon{j + 1}" for j in range(d)],
        X,
    )
    return SyntheticTruth(table=table, precision=P, support=support_from_matrix(P))


def support_from_matrix(M, tol: float = 1e-12) -> frozenset:
    M = np.asarray(M)
    d = M.shape[0]
    return frozenset(
        (i, j) for i in range(d) for j in range(i + 1, d) if abs(M[i, j]) > tol
    )


def table_from_array(X, taxa: Optional[Iterable[str]] = None) -> OtuTable:
    X = np.asarray(X, dtype=float)
    taxa = list(taxa) if taxa is not None else [f"taxon{j + 1}" for j in range(X.shape[1])]
    return OtuTable([f"s{i + 1}" for i in range(X.shape[0])], taxa, X)

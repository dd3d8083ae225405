"""Signed co-occurrence networks from fitted predictors."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .predictors import (
    CorrelationModel,
    CorrelationPredictor,
    GGMPredictor,
    GgmModel,
    LassoModel,
    LassoPredictor,
)

EDGE_TOL = 1e-12
GGM_CONVENTIONS = ("raw-precision", "partial-correlation")
EDGE_FIELDS = ["source_taxon", "target_taxon", "weight", "sign"]


@dataclass(frozen=True, eq=False)
class AssociationMatrix:
    """Symmetric, hollow matrix of signed association weights."""

    weights: np.ndarray
    taxa: tuple
    family: str
    convention: str = ""

    def __post_init__(self):
        W = np.array(self.weights, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError(f"association matrix must be square, got {W.shape}")
        if len(self.taxa) != W.shape[0]:
            raise ValueError(f"{len(self.taxa)} taxa for a {W.shape[0]}x{W.shape[0]} matrix")
        if np.max(np.abs(W - W.T), initial=0.0) > 1e-10:
            raise ValueError("association matrix is not symmetric")
        np.fill_diagonal(W, 0.0)
        W.setflags(write=False)
        object.__setattr__(self, "weights", W)
        object.__setattr__(self, "taxa", tuple(self.taxa))


@dataclass(frozen=True)
class Edge:
    i: int
    j: int
    weight: float

    @property
    def sign(self) -> int:
        return 1 if self.weight > 0 else -1


@dataclass(frozen=True)
class Network:
    taxa: tuple
    edges: tuple
    family: str = ""
    convention: str = ""

    @property
    def adjacency(self) -> np.ndarray:
        d = len(self.taxa)
        W = np.zeros((d, d))
        for e in self.edges:
            W[e.i, e.j] = W[e.j, e.i] = e.weight
        return W


@dataclass(frozen=True)
class EdgeStats:
    total: int
    positive: int
    negative: int


def _default_taxa(d):
    return tuple(f"taxon{j + 1}" for j in range(d))


def assoc_from_correlation(model: CorrelationModel, threshold: float, taxa=None) -> AssociationMatrix:
    """Correlations whose magnitude reaches the threshold; others zeroed."""
    C = np.array(model.corr, dtype=float)
    W = np.where(np.abs(C) >= threshold, C, 0.0)
    np.fill_diagonal(W, 0.0)
    return AssociationMatrix(W, taxa or _default_taxa(C.shape[0]), model.family)


def assoc_from_lasso(coef_rows, taxa=None) -> AssociationMatrix:
    """Average each coefficient with its transpose partner:
    ``(A[j, k] + A[k, j]) / 2`` where row j is the target-j regression."""
    if isinstance(coef_rows, LassoModel):
        coef_rows = coef_rows.coef_matrix
    A = np.asarray(coef_rows, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected D coefficient rows of length D, got shape {A.shape}")
    if np.any(np.diag(A) != 0):
        raise ValueError("coefficient rows must have a zero self-entry")
    return AssociationMatrix(0.5 * (A + A.T), taxa or _default_taxa(A.shape[0]), "lasso")


def assoc_from_ggm(model, convention: str = "raw-precision", taxa=None) -> AssociationMatrix:
    """Off-diagonal precision entries, or partial correlations
    ``-Theta_ij / sqrt(Theta_ii Theta_jj)``. Note that the two conventions
    have opposite signs."""
    if convention not in GGM_CONVENTIONS:
        raise ValueError(f"convention must be one of {GGM_CONVENTIONS}, got {convention!r}")
    P = model.precision if isinstance(model, GgmModel) else np.asarray(model, dtype=float)
    diag = np.diag(P)
    if np.any(diag <= 0):
        raise ValueError("precision matrix has a non-positive diagonal entry")
    if convention == "raw-precision":
        W = P.copy()
    else:
        W = -P / np.sqrt(np.outer(diag, diag))
    W = 0.5 * (W + W.T)
    np.fill_diagonal(W, 0.0)
    return AssociationMatrix(W, taxa or _default_taxa(P.shape[0]), "ggm", convention)


def association_matrix(predictor, taxa=None, ggm_convention: str = "raw-precision") -> AssociationMatrix:
    """Dispatch on a fitted estimator."""
    if isinstance(predictor, CorrelationPredictor):
        return assoc_from_correlation(predictor.model_, predictor.threshold_, taxa)
    if isinstance(predictor, LassoPredictor):
        return assoc_from_lasso(predictor.coef_, taxa)
    if isinstance(predictor, GGMPredictor):
        return assoc_from_ggm(predictor.model_, ggm_convention, taxa)
    raise TypeError(f"no association matrix for {type(predictor).__name__}")


def to_network(mat: AssociationMatrix, tol: float = EDGE_TOL) -> Network:
    W = mat.weights
    d = W.shape[0]
    edges = tuple(
        Edge(i, j, float(W[i, j]))
        for i in range(d)
        for j in range(i + 1, d)
        if abs(W[i, j]) > tol
    )
    return Network(mat.taxa, edges, mat.family, mat.convention)


def median_matrix(mats: Sequence[AssociationMatrix]) -> AssociationMatrix:
    if not mats:
        raise ValueError("need at least one association matrix")
    first = mats[0]
    for m in mats[1:]:
        if m.taxa != first.taxa:
            raise ValueError("association matrices have different taxa")
        if m.family != first.family:
            raise ValueError("association matrices come from different families")
    med = np.median(np.stack([m.weights for m in mats]), axis=0)
    return AssociationMatrix(med, first.taxa, first.family, first.convention)


def median_network(mats: Sequence[AssociationMatrix], tol: float = EDGE_TOL) -> Network:
    """Edges of the elementwise median of the per-fold matrices."""
    return to_network(median_matrix(mats), tol)


def edge_stats(net: Network) -> EdgeStats:
    pos = sum(1 for e in net.edges if e.weight > 0)
    neg = sum(1 for e in net.edges if e.weight < 0)
    return EdgeStats(pos + neg, pos, neg)


def _sorted_edges(net: Network):
    def key(e):
        a, b = sorted((net.taxa[e.i], net.taxa[e.j]))
        return (a, b)

    return sorted(net.edges, key=key)


def export_network(net: Network, path, fmt: str = "edge-list-csv") -> None:
    """Write an edge-list CSV or a node-link graph JSON, ordered by taxon pair."""
    if fmt == "edge-list-csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(EDGE_FIELDS)
            for e in _sorted_edges(net):
                writer.writerow([net.taxa[e.i], net.taxa[e.j], repr(e.weight), e.sign])
    elif fmt == "graph-json":
        doc = {
            "family": net.family,
            "convention": net.convention,
            "nodes": [{"id": t, "index": k} for k, t in enumerate(net.taxa)],
            "links": [
                {
                    "source": net.taxa[e.i],
                    "target": net.taxa[e.j],
                    "weight": e.weight,
                    "sign": e.sign,
                }
                for e in _sorted_edges(net)
            ],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    else:
        raise ValueError(f"unknown network format {fmt!r}")


def read_edge_list(path, taxa: Sequence[str]) -> Network:
    index = {t: k for k, t in enumerate(taxa)}
    edges = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            i, j = index[row["source_taxon"]], index[row["target_taxon"]]
            i, j = min(i, j), max(i, j)
            edges.append(Edge(i, j, float(row["weight"])))
    return Network(tuple(taxa), tuple(sorted(edges, key=lambda e: (e.i, e.j))))


def read_graph_json(path) -> Network:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    taxa = tuple(n["id"] for n in sorted(doc["nodes"], key=lambda n: n["index"]))
    index = {t: k for k, t in enumerate(taxa)}
    edges = []
    for link in doc["links"]:
        i, j = sorted((index[link["source"]], index[link["target"]]))
        edges.append(Edge(i, j, float(link["weight"])))
    return Network(
        taxa,
        tuple(sorted(edges, key=lambda e: (e.i, e.j))),
        doc.get("family", ""),
        doc.get("convention", ""),
    )


def edge_f1(predicted: Network, truth_support) -> float:
    """F1 of the predicted edge set against a set of ``(i, j)``, ``i < j``."""
    pred = {(e.i, e.j) for e in predicted.edges}
    truth = set(truth_support)
    if not pred and not truth:
        return 1.0
    tp = len(pred & truth)
    if tp == 0:
        return 0.0
    precision = tp / len(pred)
    recall = tp / len(truth)
    return 2 * precision * recall / (precision + recall)

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coocnet.network import (
    AssociationMatrix,
    Edge,
    Network,
    assoc_from_correlation,
    assoc_from_ggm,
    assoc_from_lasso,
    association_matrix,
    edge_f1,
    edge_stats,
    export_network,
    median_matrix,
    median_network,
    read_edge_list,
    read_graph_json,
    to_network,
)
from coocnet.otu_io import generate_synthetic
from coocnet.predictors import (
    CorrelationPredictor,
    FeaturelessPredictor,
    GGMPredictor,
    LassoPredictor,
    fit_correlation,
)

from conftest import random_spd

TAXA3 = ("a", "b", "c")


def mat(entries, d=3, taxa=None, family="lasso"):
    W = np.zeros((d, d))
    for (i, j), v in entries.items():
        W[i, j] = W[j, i] = v
    return AssociationMatrix(W, taxa or TAXA3[:d], family)


class TestCorrelationAssociation:
    def test_threshold_extremes(self, rng):
        m = fit_correlation(rng.standard_normal((30, 4)))
        assert not to_network(assoc_from_correlation(m, 1 + 1e-9)).edges
        assert len(to_network(assoc_from_correlation(m, 0.0)).edges) == 6

    @given(st.integers(0, 10_000))
    @settings(max_examples=20, deadline=None)
    def test_edge_count_non_increasing_in_threshold(self, seed):
        m = fit_correlation(np.random.default_rng(seed).standard_normal((15, 5)))
        counts = [len(to_network(assoc_from_correlation(m, t)).edges) for t in np.linspace(0, 1, 21)]
        assert all(b <= a for a, b in zip(counts, counts[1:]))


class TestLassoAssociation:
    def test_mean_rule(self):
        A = np.zeros((3, 3))
        A[0, 1] = 0.4
        A[1, 2], A[2, 1] = 0.4, -0.4
        W = assoc_from_lasso(A).weights
        assert W[0, 1] == W[1, 0] == 0.2
        assert W[1, 2] == 0.0

    def test_empty_and_errors(self):
        assert not to_network(assoc_from_lasso(np.zeros((3, 3)))).edges
        with pytest.raises(ValueError):
            assoc_from_lasso(np.eye(3))
        with pytest.raises(ValueError):
            assoc_from_lasso(np.zeros((3, 4)))


class TestGgmAssociation:
    def test_diagonal_precision_is_empty(self):
        assert not to_network(assoc_from_ggm(np.diag([1.0, 2.0, 3.0]))).edges

    def test_sign_flip_between_conventions(self):
        P = np.array([[2.0, -0.5], [-0.5, 1.0]])
        raw = assoc_from_ggm(P)
        pc = assoc_from_ggm(P, "partial-correlation")
        assert raw.weights[0, 1] == -0.5 and raw.convention == "raw-precision"
        assert pc.weights[0, 1] == pytest.approx(0.5 / np.sqrt(2.0)) and pc.weights[0, 1] > 0

    @given(st.integers(0, 10_000), st.integers(2, 8))
    @settings(max_examples=40, deadline=None)
    def test_partial_correlations_in_open_unit_interval(self, seed, d):
        P = random_spd(np.random.default_rng(seed), d, 0.05)
        W = assoc_from_ggm(P, "partial-correlation").weights
        assert np.all(np.abs(W) < 1)

    def test_errors(self):
        with pytest.raises(ValueError):
            assoc_from_ggm(np.array([[0.0, 0.1], [0.1, 1.0]]))
        with pytest.raises(ValueError):
            assoc_from_ggm(np.eye(2), "covariance")


class TestMedian:
    def test_examples(self):
        folds = [mat({(0, 1): 0.0, (0, 2): 0.0}), mat({(0, 1): 0.5, (0, 2): 0.0}), mat({(0, 1): 0.6, (0, 2): 0.8})]
        net = median_network(folds)
        assert [(e.i, e.j, e.weight) for e in net.edges] == [(0, 1, 0.5)]

    def test_idempotent(self):
        m = mat({(0, 1): -0.3, (1, 2): 0.7})
        assert median_network([m, m, m]) == to_network(m)

    def test_mismatch(self):
        with pytest.raises(ValueError):
            median_network([mat({}), mat({}, taxa=("x", "y", "z"))])
        with pytest.raises(ValueError):
            median_network([mat({}), mat({}, family="ggm")])
        with pytest.raises(ValueError):
            median_network([])

    @given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=1), st.integers(0, 2))
    @settings(max_examples=30, deadline=None)
    def test_single_fold_entry_never_survives(self, vals, where):
        mats = [mat({}) for _ in range(3)]
        mats[where] = mat({(0, 2): vals[0]})
        assert not median_network(mats).edges

    def test_median_symmetric(self, rng):
        mats = []
        for _ in range(3):
            A = rng.standard_normal((4, 4))
            mats.append(AssociationMatrix(A + A.T, ("a", "b", "c", "d"), "ggm"))
        W = median_matrix(mats).weights
        assert np.max(np.abs(W - W.T)) < 1e-10 and np.all(np.diag(W) == 0)


class TestAssociationMatrixType:
    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError):
            AssociationMatrix(np.array([[0, 1.0], [0.5, 0]]), ("a", "b"), "x")

    def test_diagonal_zeroed_and_dust_ignored(self):
        m = AssociationMatrix(np.array([[5.0, 1e-13], [1e-13, 5.0]]), ("a", "b"), "x")
        assert np.all(np.diag(m.weights) == 0)
        assert not to_network(m).edges


class TestStatsAndExport:
    def test_edge_stats(self):
        empty = edge_stats(Network(TAXA3, ()))
        assert (empty.total, empty.positive, empty.negative) == (0, 0, 0)
        st_ = edge_stats(to_network(mat({(0, 1): 0.2, (0, 2): -0.1, (1, 2): -0.4})))
        assert (st_.total, st_.positive, st_.negative) == (3, 1, 2)

    def test_csv_round_trip_and_order(self, tmp_path):
        taxa = ("zeta", "alpha", "mid")
        net = to_network(mat({(0, 1): 0.25, (1, 2): -1 / 3, (0, 2): 0.1}, taxa=taxa))
        p = tmp_path / "e.csv"
        export_network(net, p)
        lines = p.read_text().splitlines()
        assert lines[0] == "source_taxon,target_taxon,weight,sign"
        pairs = [tuple(sorted(line.split(",")[:2])) for line in lines[1:]]
        assert pairs == sorted(pairs)
        back = read_edge_list(p, taxa)
        assert set(back.edges) == set(net.edges)

    def test_json_round_trip(self, tmp_path):
        net = to_network(assoc_from_ggm(np.array([[2.0, -0.5, 0], [-0.5, 1.0, 0.2], [0, 0.2, 1.0]])))
        p = tmp_path / "g.json"
        export_network(net, p, "graph-json")
        doc = json.loads(p.read_text())
        assert doc["convention"] == "raw-precision" and len(doc["nodes"]) == 3
        back = read_graph_json(p)
        assert set(back.edges) == set(net.edges) and back.taxa == net.taxa

    def test_empty_csv_is_header_only(self, tmp_path):
        p = tmp_path / "e.csv"
        export_network(Network(TAXA3, ()), p)
        assert p.read_text() == "source_taxon,target_taxon,weight,sign\n"

    def test_unknown_format_and_unwritable(self, tmp_path):
        with pytest.raises(ValueError):
            export_network(Network(TAXA3, ()), tmp_path / "x", "gml")
        with pytest.raises(OSError):
            export_network(Network(TAXA3, ()), tmp_path / "missing" / "x.csv")


def test_edge_sign():
    assert Edge(0, 1, -0.1).sign == -1 and Edge(0, 1, 2.0).sign == 1


def test_edge_f1():
    net = to_network(mat({(0, 1): 1.0, (1, 2): 1.0}))
    assert edge_f1(net, {(0, 1), (1, 2)}) == 1.0
    assert edge_f1(net, {(0, 1)}) == pytest.approx(2 / 3)
    assert edge_f1(net, {(0, 2)}) == 0.0
    assert edge_f1(Network(TAXA3, ()), set()) == 1.0


def test_dispatch_from_fitted_estimators():
    X = generate_synthetic(4, 80, 0.5, 0).table.counts
    taxa = ("w", "x", "y", "z")
    for est, family in [(CorrelationPredictor("pearson"), "pearson"), (LassoPredictor(), "lasso"),
                        (GGMPredictor(), "ggm")]:
        m = association_matrix(est.fit(X), taxa)
        assert m.family == family and m.taxa == taxa
    with pytest.raises(TypeError):
        association_matrix(FeaturelessPredictor().fit(X))

"""Cross-validated inference of microbial co-occurrence networks.

Four network families (Pearson and Spearman correlation thresholding,
per-taxon LASSO regression and the graphical lasso) are compared by how
well each predicts a held-out taxon from the others.
"""
__version__ = "0.1.0"

from .cv import EvalRecord, SummaryRow, aggregate, evaluate, subsample_curve
from .network import (
    AssociationMatrix,
    Network,
    association_matrix,
    edge_f1,
    edge_stats,
    export_network,
    median_network,
)
from .otu_io import OtuTable, generate_synthetic, load_otu_csv, subsample, validate_table
from .predictors import (
    CorrelationPredictor,
    FeaturelessPredictor,
    GGMPredictor,
    LassoPredictor,
    PredictorSpec,
)
from .solvers import graphical_lasso, lasso_cd, lasso_path
from .splits import inner_split, make_folds
from .transform import AbundanceTransformer, fit_pipeline, apply_pipeline

__all__ = [
    "AbundanceTransformer",
    "AssociationMatrix",
    "CorrelationPredictor",
    "EvalRecord",
    "FeaturelessPredictor",
    "GGMPredictor",
    "LassoPredictor",
    "Network",
    "OtuTable",
    "PredictorSpec",
    "SummaryRow",
    "aggregate",
    "apply_pipeline",
    "association_matrix",
    "edge_f1",
    "edge_stats",
    "evaluate",
    "export_network",
    "fit_pipeline",
    "generate_synthetic",
    "graphical_lasso",
    "inner_split",
    "lasso_cd",
    "lasso_path",
    "load_otu_csv",
    "make_folds",
    "median_network",
    "subsample",
    "subsample_curve",
    "validate_table",
]

"""Financial distress identification toolkit.

Thin wrapper over the compiled core: ratio datasets, PCA with varimax
rotation, agglomerative clustering, CHAID trees, binary logit estimation
and the end-to-end pipeline.
"""

from ._core import (
    ChaidTree,
    Dataset,
    DistressError,
    LogitFit,
    PcaModel,
    RotatedModel,
    classify_cutoff,
    cluster,
    fit_chaid,
    fit_logit,
    fit_pca,
    generate_synthetic,
    load_dataset,
    predict_prob,
    ratio_codes,
    run_pipeline,
    select_components,
    varimax_rotate,
)

__all__ = [
    "ChaidTree",
    "Dataset",
    "DistressError",
    "LogitFit",
    "PcaModel",
    "RotatedModel",
    "classify_cutoff",
    "cluster",
    "fit_chaid",
    "fit_logit",
    "fit_pca",
    "generate_synthetic",
    "load_dataset",
    "predict_prob",
    "ratio_codes",
    "run_pipeline",
    "select_components",
    "varimax_rotate",
]

__version__ = "0.1.0"

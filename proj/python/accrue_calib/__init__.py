"""Probabilistic forecast calibration.

Scores sharpness (CRPS) and calibration (reliability of the PIT histogram),
blends them into a single training loss, and fits small per-input neural
networks that map features to Gaussian, two-piece-Gaussian, or asymmetric-
Laplace error distributions.
"""

from ._core import (
    accrue_loss,
    al_crps,
    calibrate_csv,
    calibrate_scenario,
    cdf,
    crps,
    evaluate,
    gaussian_beta_heuristic,
    gaussian_crps,
    generate,
    generate_csv,
    pdf,
    predict,
    quantile,
    reliability_score,
    tpg_crps,
)

__all__ = [
    "accrue_loss",
    "al_crps",
    "calibrate_csv",
    "calibrate_scenario",
    "cdf",
    "crps",
    "evaluate",
    "gaussian_beta_heuristic",
    "gaussian_crps",
    "generate",
    "generate_csv",
    "pdf",
    "predict",
    "quantile",
    "reliability_score",
    "tpg_crps",
]

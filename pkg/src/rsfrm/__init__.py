"""Fuzzy rule-based regression with quadratic consequents and grouped ridge penalties."""

__version__ = "0.1.0"

from .dataio import Dataset, fit_normalizer, generate_synthetic, kfold_split, load_keel, save_keel
from .fcm import FcmConfig, FcmPartition, fit_fcm, membership_of
from .metrics import Metric, half_mse, rmse, summarize
from .model import (
    PenaltySpec,
    RsfrmModel,
    fit_coefficients,
    fit_model,
    lssc,
    load_model,
    predict,
    save_model,
)
from .harness import config_from_dict, emit_report, load_config, run_experiment
from .stats import bonferroni_dunn_cd, compare_to_control, friedman, rank_row, rank_table

__all__ = [
    "Dataset", "fit_normalizer", "generate_synthetic", "kfold_split", "load_keel", "save_keel",
    "FcmConfig", "FcmPartition", "fit_fcm", "membership_of",
    "Metric", "half_mse", "rmse", "summarize",
    "PenaltySpec", "RsfrmModel", "fit_coefficients", "fit_model", "lssc", "load_model",
    "predict", "save_model",
    "config_from_dict", "emit_report", "load_config", "run_experiment",
    "bonferroni_dunn_cd", "compare_to_control", "friedman", "rank_row", "rank_table",
]

"""Generative regressors over polynomial day-index features."""

from .brr import BRRConfig, BRRModel, brr_fit, brr_posterior, brr_predict
from .features import DesignMatrix, FeatureParams, build_features
from .gpr import (
    Bounds,
    GPRConfig,
    GPRModel,
    gpr_fit,
    gpr_predict,
    log_marginal_likelihood,
    optimize_hyperparams,
)
from .kernels import KernelSpec, kernel_diag, kernel_eval
from .prediction import Prediction

__all__ = [
    "BRRConfig",
    "BRRModel",
    "Bounds",
    "DesignMatrix",
    "FeatureParams",
    "GPRConfig",
    "GPRModel",
    "KernelSpec",
    "Prediction",
    "brr_fit",
    "brr_posterior",
    "brr_predict",
    "build_features",
    "gpr_fit",
    "gpr_predict",
    "kernel_diag",
    "kernel_eval",
    "log_marginal_likelihood",
    "optimize_hyperparams",
]

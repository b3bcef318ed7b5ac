"""Bayesian ridge regression with evidence-approximation hyperparameters.

Weights get an isotropic Gaussian prior with precision ``lambda_`` and the
observations Gaussian noise with precision ``alpha``. Both precisions are
re-estimated by MacKay's fixed-point updates, with Gamma hyperpriors
``(a1, a2)`` on ``alpha`` and ``(l1, l2)`` on ``lambda_``. Targets and
feature columns are centered on their training means and a constant column
is appended last, so ``weight_mean[:-1]`` are the polynomial weights and
``weight_mean[-1]`` the intercept. Centering keeps the intercept out of the
ridge trade-off (its posterior mean is exactly zero); it still adds the
uncertainty of the mean to the predictive variance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import NotPositiveDefinite, PreconditionError, SingularSystem
from ..numerics import cholesky_with_jitter, jacobi_eigenvalues, spd_inverse
from .features import DesignMatrix, FeatureParams
from .prediction import Prediction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BRRConfig:
    alpha_init: float | None = None  # None -> 1 / var(y)
    lambda_init: float = 1.0
    a1: float = 1e-6
    a2: float = 1e-6
    l1: float = 1e-6
    l2: float = 1e-6
    max_iter: int = 300
    tol: float = 1e-3
    learn_hyperparams: bool = True


@dataclass(frozen=True)
class BRRModel:
    weight_mean: np.ndarray
    weight_cov: np.ndarray
    alpha: float
    lambda_: float
    n_iter_used: int
    converged: bool
    feature_params: FeatureParams
    y_offset: float
    feature_mean: np.ndarray


def augment(phi: np.ndarray) -> np.ndarray:
    return np.hstack([phi, np.ones((phi.shape[0], 1))])


def brr_posterior(phi_aug: np.ndarray, y_c: np.ndarray, alpha: float, lambda_: float):
    """Posterior mean and covariance of the weights for fixed precisions."""
    gram = phi_aug.T @ phi_aug
    A = lambda_ * np.eye(gram.shape[0]) + alpha * gram
    A = 0.5 * (A + A.T)
    try:
        f = cholesky_with_jitter(A)
    except NotPositiveDefinite as exc:
        raise SingularSystem(exc.pivot, exc.value) from exc
    S = spd_inverse(f)
    m = alpha * (S @ (phi_aug.T @ y_c))
    return m, S


def brr_fit(design: DesignMatrix, y, config: BRRConfig | None = None) -> BRRModel:
    config = config or BRRConfig()
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    n = y.shape[0]
    if n < 2:
        raise PreconditionError(f"BRR needs at least 2 points, got {n}")
    if n != design.n:
        raise PreconditionError(f"{n} targets for {design.n} feature rows")
    if not np.all(np.isfinite(y)):
        raise PreconditionError("targets contain non-finite values")

    y_offset = float(np.mean(y))
    y_c = y - y_offset
    feature_mean = design.phi.mean(axis=0)
    phi = augment(design.phi - feature_mean)
    eig = np.clip(jacobi_eigenvalues(phi.T @ phi), 0.0, None)

    var_y = float(np.var(y))
    alpha = config.alpha_init if config.alpha_init is not None else 1.0 / (var_y if var_y > 0 else 1.0)
    lambda_ = config.lambda_init

    converged = False
    n_iter = 0
    if config.learn_hyperparams:
        for n_iter in range(1, config.max_iter + 1):
            m, _ = brr_posterior(phi, y_c, alpha, lambda_)
            gamma = float(np.sum(alpha * eig / (lambda_ + alpha * eig)))
            resid = y_c - phi @ m
            new_lambda = (gamma + 2.0 * config.l1) / (float(m @ m) + 2.0 * config.l2)
            new_alpha = (n - gamma + 2.0 * config.a1) / (float(resid @ resid) + 2.0 * config.a2)
            d_lambda = abs(new_lambda - lambda_) / lambda_
            d_alpha = abs(new_alpha - alpha) / alpha
            alpha, lambda_ = new_alpha, new_lambda
            if max(d_lambda, d_alpha) < config.tol:
                converged = True
                break
        if not converged:
            logger.warning("BRR evidence loop did not converge in %d iterations", config.max_iter)

    m, S = brr_posterior(phi, y_c, alpha, lambda_)
    return BRRModel(
        weight_mean=m,
        weight_cov=S,
        alpha=float(alpha),
        lambda_=float(lambda_),
        n_iter_used=n_iter,
        converged=converged,
        feature_params=design.params,
        y_offset=y_offset,
        feature_mean=feature_mean,
    )


def brr_predict(model: BRRModel, x_new) -> Prediction:
    x = np.asarray(x_new, dtype=np.float64).reshape(-1)
    if x.size == 0:
        return Prediction.empty()
    phi = augment(model.feature_params.transform(x) - model.feature_mean)
    mean = phi @ model.weight_mean + model.y_offset
    var = 1.0 / model.alpha + np.einsum("ij,jk,ik->i", phi, model.weight_cov, phi)
    return Prediction(mean, np.sqrt(np.clip(var, 0.0, None)))

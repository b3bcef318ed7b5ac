"""Exact Gaussian process regression with a dot-product + white kernel.

Targets are centered and, by default, divided by their training standard
deviation before the hyperparameter search; that is the same as giving the
kernel a fixed amplitude ``y_scale**2``, which the bare dot-product kernel
lacks. The stored dual weights are ``(K + noise*I)^{-1} y_c`` in both modes.
Kernel hyperparameters are tuned by maximizing the
log marginal likelihood with a derivative-free coordinate search in log
space: each coordinate gets a golden-section line search over its whole
bound, sweeps repeat until the gain drops below ``1e-6``, and the search is
restarted from seeded log-uniform points.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import NotPositiveDefinite, PreconditionError
from ..numerics import CholeskyFactor, cholesky_with_jitter, log_det, lower_solve, solve_spd
from .features import DesignMatrix
from .kernels import KernelSpec, kernel_diag, kernel_eval
from .prediction import Prediction

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Bounds:
    sigma0_sq: tuple[float, float] = (1e-5, 1e5)
    noise_level: tuple[float, float] = (1e-5, 1e5)

    def log_box(self) -> np.ndarray:
        return np.log(np.array([self.sigma0_sq, self.noise_level], dtype=np.float64))


@dataclass(frozen=True)
class GPRConfig:
    spec_init: KernelSpec = field(default_factory=KernelSpec)
    optimize: bool = True
    bounds: Bounds = field(default_factory=Bounds)
    restarts: int = 2
    seed: int = 42
    normalize_y: bool = True


@dataclass(frozen=True)
class GPRModel:
    spec: KernelSpec
    train_phi: DesignMatrix
    dual: np.ndarray
    chol: CholeskyFactor
    y_offset: float
    log_marginal: float
    y_scale: float = 1.0


def _factor(spec: KernelSpec, design) -> CholeskyFactor:
    K = kernel_eval(spec, design, design, include_white=True)
    return cholesky_with_jitter(K)


def log_marginal_likelihood(spec: KernelSpec, design, y_c) -> float:
    y_c = np.asarray(y_c, dtype=np.float64).reshape(-1)
    f = _factor(spec, design)
    dual = solve_spd(f, y_c)
    return float(-0.5 * y_c @ dual - 0.5 * log_det(f) - 0.5 * y_c.shape[0] * LOG_2PI)


def _golden_max(fn, lo: float, hi: float, tol: float) -> tuple[float, float]:
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def _coordinate_search(objective, theta0, box, gain_tol=1e-6, line_tol=1e-4, max_sweeps=50):
    theta = np.clip(np.asarray(theta0, dtype=np.float64), box[:, 0], box[:, 1])
    best = objective(theta)
    for _ in range(max_sweeps):
        start = best
        for k in range(theta.shape[0]):
            def along(t, k=k):
                trial = theta.copy()
                trial[k] = t
                return objective(trial)

            t, val = _golden_max(along, box[k, 0], box[k, 1], line_tol)
            if val > best:
                theta[k] = t
                best = val
        if not (best - start >= gain_tol):
            break
    return theta, best


def optimize_hyperparams(
    design,
    y_c,
    bounds: Bounds | None = None,
    restarts: int = 2,
    seed: int = 42,
    initial: KernelSpec | None = None,
) -> KernelSpec:
    """Maximize the log marginal likelihood over ``(sigma0_sq, noise_level)``.

    Starting points are ``initial`` (if given) followed by ``restarts``
    log-uniform draws from a generator seeded with ``seed``.
    """
    y_c = np.asarray(y_c, dtype=np.float64).reshape(-1)
    if y_c.shape[0] < 2:
        raise PreconditionError("hyperparameter search needs at least 2 points")
    box = (bounds or Bounds()).log_box()

    def objective(theta) -> float:
        try:
            return log_marginal_likelihood(KernelSpec.from_log(theta), design, y_c)
        except NotPositiveDefinite:
            return -math.inf

    rng = np.random.default_rng(seed)
    starts = [] if initial is None else [initial.as_log()]
    starts += [rng.uniform(box[:, 0], box[:, 1]) for _ in range(max(restarts, 0))]
    if not starts:
        starts = [box.mean(axis=1)]

    best_theta, best_val = None, -math.inf
    for theta0 in starts:
        theta, val = _coordinate_search(objective, theta0, box)
        if best_theta is None or val > best_val:
            best_theta, best_val = theta, val
    logger.debug("GPR hyperparameters %s, log marginal %.6g", np.exp(best_theta), best_val)
    return KernelSpec.from_log(best_theta)


def gpr_fit(design: DesignMatrix, y, config: GPRConfig | None = None) -> GPRModel:
    config = config or GPRConfig()
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    n = y.shape[0]
    if n < 2:
        raise PreconditionError(f"GPR needs at least 2 points, got {n}")
    if n != design.n:
        raise PreconditionError(f"{n} targets for {design.n} feature rows")
    if not np.all(np.isfinite(y)):
        raise PreconditionError("targets contain non-finite values")

    y_offset = float(np.mean(y))
    y_c = y - y_offset
    y_scale = 1.0
    if config.normalize_y:
        sd = float(np.std(y_c))
        y_scale = sd if sd > 0.0 else 1.0
    spec = config.spec_init
    if config.optimize:
        spec = optimize_hyperparams(
            design, y_c / y_scale, config.bounds, config.restarts, config.seed, initial=config.spec_init
        )
    f = _factor(spec, design)
    dual = solve_spd(f, y_c)
    # evidence of y_c under the amplitude-scaled kernel
    lml = float(
        -0.5 * y_c @ dual / y_scale**2 - 0.5 * log_det(f) - n * math.log(y_scale) - 0.5 * n * LOG_2PI
    )
    return GPRModel(spec, design, dual, f, y_offset, lml, y_scale)


def gpr_predict(model: GPRModel, x_new) -> Prediction:
    """Latent-function posterior at ``x_new``; the white term is left out."""
    x = np.asarray(x_new, dtype=np.float64).reshape(-1)
    if x.size == 0:
        return Prediction.empty()
    phi = model.train_phi.params.transform(x)
    K_star = kernel_eval(model.spec, phi, model.train_phi.phi)
    mean = K_star @ model.dual + model.y_offset
    v = lower_solve(model.chol, K_star.T)
    var = (kernel_diag(model.spec, phi) - np.sum(v * v, axis=0)) * model.y_scale**2
    negative = var < 0.0
    n_clamped = int(np.count_nonzero(negative))
    if n_clamped:
        logger.debug("clamped %d negative predictive variances", n_clamped)
    return Prediction(mean, np.sqrt(np.where(negative, 0.0, var)), n_clamped)

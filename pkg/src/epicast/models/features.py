"""Polynomial features of the day index."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInput


@dataclass(frozen=True)
class FeatureParams:
    """Everything needed to rebuild features for new day indices."""

    degree: int
    standardize: bool
    mu: float
    s: float

    def transform(self, x_raw) -> np.ndarray:
        x = np.asarray(x_raw, dtype=np.float64).reshape(-1)
        if self.standardize:
            x = (x - self.mu) / self.s
        powers = np.arange(1, self.degree + 1, dtype=np.float64)
        return x[:, None] ** powers[None, :]


@dataclass(frozen=True)
class DesignMatrix:
    x_raw: np.ndarray
    params: FeatureParams
    phi: np.ndarray

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    @property
    def degree(self) -> int:
        return self.params.degree

    @property
    def standardize(self) -> bool:
        return self.params.standardize

    @property
    def mu(self) -> float:
        return self.params.mu

    @property
    def s(self) -> float:
        return self.params.s


def build_features(x_raw, degree: int = 3, standardize: bool = True) -> DesignMatrix:
    """Column ``j`` holds ``z**(j+1)``, ``z`` the (optionally standardized) day index.

    Standardization uses the mean and population standard deviation of
    ``x_raw``; those are kept in ``params`` so that test-time features reuse
    the training transform.
    """
    x = np.asarray(x_raw, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise DegenerateInput("x_raw is empty")
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    if not np.all(np.isfinite(x)):
        raise DegenerateInput("x_raw has non-finite entries")
    mu = float(np.mean(x))
    s = float(np.std(x))
    if standardize and not s > 0.0:
        raise DegenerateInput("cannot standardize a constant day index")
    params = FeatureParams(degree, standardize, mu, s)
    phi = params.transform(x)
    if not np.all(np.isfinite(phi)):
        raise DegenerateInput("features overflowed; lower the degree or standardize")
    return DesignMatrix(x, params, phi)

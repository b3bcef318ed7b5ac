"""Dot-product + white-noise covariance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch
from .features import DesignMatrix


@dataclass(frozen=True)
class KernelSpec:
    """``k(x, x') = sigma0_sq + x . x'`` plus ``noise_level`` on the training diagonal."""

    sigma0_sq: float = 1.0
    noise_level: float = 1.0

    def __post_init__(self):
        for name in ("sigma0_sq", "noise_level"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")

    def as_log(self) -> np.ndarray:
        return np.log([self.sigma0_sq, self.noise_level])

    @classmethod
    def from_log(cls, theta) -> "KernelSpec":
        return cls(float(np.exp(theta[0])), float(np.exp(theta[1])))


def as_rows(x) -> np.ndarray:
    if isinstance(x, DesignMatrix):
        return x.phi
    m = np.asarray(x, dtype=np.float64)
    if m.ndim == 1:
        m = m[:, None]
    return m


def kernel_eval(spec: KernelSpec, a, b, include_white: bool = False) -> np.ndarray:
    """Gram matrix between the rows of ``a`` and ``b``.

    The white term lands on the diagonal only when ``a`` and ``b`` are the
    same data, i.e. for the training covariance.
    """
    same = a is b
    a = as_rows(a)
    b = as_rows(b)
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"feature counts differ: {a.shape[1]} vs {b.shape[1]}")
    same = same or (a.shape == b.shape and np.array_equal(a, b))
    K = spec.sigma0_sq + a @ b.T
    if same:
        K = 0.5 * (K + K.T)
        if include_white:
            K[np.diag_indices_from(K)] += spec.noise_level
    return K


def kernel_diag(spec: KernelSpec, a) -> np.ndarray:
    """``k(x, x)`` for each row, without the white term."""
    a = as_rows(a)
    return spec.sigma0_sq + np.einsum("ij,ij->i", a, a)

"""Dense SPD linear algebra: Cholesky factorization, solves, log-determinants.

Matrices are plain row-major ``float64`` numpy arrays. Nothing here adds
regularization on its own; callers that want a jitter ladder use
:func:`cholesky_with_jitter` explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite

SYMMETRY_RTOL = 1e-12
DEFAULT_JITTER_LADDER = (1.0, 10.0, 100.0)


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular ``L`` with ``L @ L.T`` equal to the factored matrix.

    ``jitter`` records the diagonal shift that was needed, 0.0 if none.
    """

    lower: np.ndarray
    jitter: float = 0.0

    @property
    def dim(self) -> int:
        return self.lower.shape[0]


def as_matrix(a) -> np.ndarray:
    m = np.array(a, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def cholesky(a) -> CholeskyFactor:
    """Factor a symmetric positive-definite matrix.

    Raises NotPositiveDefinite with the index of the first non-positive pivot.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise DimensionMismatch(f"cholesky needs a square matrix, got {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if np.max(np.abs(a - a.T), initial=0.0) > SYMMETRY_RTOL * scale:
        raise ValueError("matrix is not symmetric")

    L = np.zeros_like(a)
    for j in range(n):
        row = L[j, :j]
        pivot = a[j, j] - row @ row
        if not pivot > 0.0:
            raise NotPositiveDefinite(j, float(pivot))
        d = math.sqrt(pivot)
        L[j, j] = d
        if j + 1 < n:
            L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ row) / d
    return CholeskyFactor(L)


def cholesky_with_jitter(
    a, ladder: Sequence[float] = DEFAULT_JITTER_LADDER, base: float = 1e-10
) -> CholeskyFactor:
    """Try a plain factorization, then ``base * mean(diag) * step`` shifts.

    The last NotPositiveDefinite is re-raised if every rung fails.
    """
    a = as_matrix(a)
    try:
        return cholesky(a)
    except NotPositiveDefinite as exc:
        last = exc
    mean_diag = float(np.mean(np.abs(np.diag(a)))) if a.size else 0.0
    if mean_diag == 0.0:
        raise last
    eye = np.eye(a.shape[0])
    for step in ladder:
        jitter = base * mean_diag * step
        try:
            f = cholesky(a + jitter * eye)
        except NotPositiveDefinite as exc:
            last = exc
            continue
        return CholeskyFactor(f.lower, jitter)
    raise last


def forward_substitute(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = L.shape[0]
    x = np.zeros_like(b, dtype=np.float64)
    for i in range(n):
        x[i] = (b[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def back_substitute(U: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = U.shape[0]
    x = np.zeros_like(b, dtype=np.float64)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - U[i, i + 1 :] @ x[i + 1 :]) / U[i, i]
    return x


def solve_spd(f: CholeskyFactor, b) -> np.ndarray:
    """Solve ``A x = b`` given ``f = cholesky(A)``; ``b`` may be a vector or matrix."""
    b = np.asarray(b, dtype=np.float64)
    if b.ndim not in (1, 2) or b.shape[0] != f.dim:
        raise DimensionMismatch(f"right-hand side of shape {b.shape} does not match dim {f.dim}")
    y = forward_substitute(f.lower, b)
    return back_substitute(f.lower.T, y)


def lower_solve(f: CholeskyFactor, b) -> np.ndarray:
    """``L^{-1} b``; handy for predictive variances."""
    b = np.asarray(b, dtype=np.float64)
    if b.ndim not in (1, 2) or b.shape[0] != f.dim:
        raise DimensionMismatch(f"right-hand side of shape {b.shape} does not match dim {f.dim}")
    return forward_substitute(f.lower, b)


def spd_inverse(f: CholeskyFactor) -> np.ndarray:
    inv = solve_spd(f, np.eye(f.dim))
    return 0.5 * (inv + inv.T)


def log_det(f: CholeskyFactor) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(f.lower))))


def jacobi_eigenvalues(a, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.

    Intended for the handful-of-columns Gram matrices of the regressors.
    Returned in ascending order.
    """
    a = as_matrix(a).copy()
    n = a.shape[0]
    if n != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {a.shape}")
    total = float(np.sum(a * a))
    for _ in range(max_sweeps):
        off = 2.0 * float(np.sum(np.triu(a, 1) ** 2))
        if off <= tol * tol * max(total, 1e-300):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                a = 0.5 * (a + a.T)
    return np.sort(np.diag(a))

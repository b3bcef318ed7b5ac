from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Prediction:
    """Pointwise predictive mean and standard deviation.

    ``n_clamped`` counts variances that came out negative from round-off
    and were clamped to zero.
    """

    mean: np.ndarray
    std: np.ndarray
    n_clamped: int = 0

    def __post_init__(self):
        if self.mean.shape != self.std.shape:
            raise ValueError("mean and std must have the same shape")

    def __len__(self) -> int:
        return self.mean.shape[0]

    @classmethod
    def empty(cls) -> "Prediction":
        return cls(np.zeros(0), np.zeros(0))

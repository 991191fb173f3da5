"""Adaptive-moment (Adam) parameter updates shared by the trainers.

Constants are fixed package-wide for reproducibility; every training loop
in this package is full-precision, sequential, and bitwise deterministic.
"""

from __future__ import annotations

import numpy as np

BETA1 = 0.9
BETA2 = 0.999
EPS = 1e-8


class AdamState:
    """First/second-moment accumulators for one parameter array."""

    def __init__(self, shape: tuple[int, ...]) -> None:
        self.m = np.zeros(shape, dtype=np.float64)
        self.v = np.zeros(shape, dtype=np.float64)
        self.t = 0

    def update(self, grad: np.ndarray, learning_rate: float) -> np.ndarray:
        """Advance one step and return the increment to add to the parameters."""
        self.t += 1
        self.m *= BETA1
        self.m += (1.0 - BETA1) * grad
        self.v *= BETA2
        self.v += (1.0 - BETA2) * (grad * grad)
        m_hat = self.m / (1.0 - BETA1**self.t)
        v_hat = self.v / (1.0 - BETA2**self.t)
        return -learning_rate * m_hat / (np.sqrt(v_hat) + EPS)

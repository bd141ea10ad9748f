"""Linear dispersion and loss on the wave-mode grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import FieldGrid


@dataclass
class DispersionSpec:
    """Phase rate ``omega`` and field decay rate ``kappa`` per wave mode (FFT order)."""

    omega: np.ndarray
    kappa: np.ndarray

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        self.kappa = np.broadcast_to(np.asarray(self.kappa, dtype=float), self.omega.shape).copy()
        if not (np.all(np.isfinite(self.omega)) and np.all(np.isfinite(self.kappa))):
            raise ValueError("dispersion entries must be finite")
        if np.any(self.kappa < 0):
            raise ValueError("kappa must be >= 0")

    @classmethod
    def polynomial(cls, grid: FieldGrid, offset=0.0, slope=0.0, gvd=0.0, tod=0.0, kappa=0.0):
        """``offset + slope k + gvd k^2/2 + tod k^3/6`` on the grid frequencies."""
        k = grid.k
        omega = offset + slope * k + 0.5 * gvd * k**2 + tod * k**3 / 6.0
        return cls(omega, kappa)

    @classmethod
    def none(cls, grid: FieldGrid):
        return cls(np.zeros(grid.M), 0.0)

    @property
    def lossless(self) -> bool:
        return not np.any(self.kappa)

    def factor(self, dt: float) -> np.ndarray:
        """``exp(-i (omega - i kappa) dt)``: the mean propagator over ``dt``."""
        if dt < 0:
            raise ValueError("dt must be >= 0")
        return np.exp((-1j * self.omega - self.kappa) * dt)

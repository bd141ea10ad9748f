"""Comoving-window discretization and the unitary transforms between bin and wave modes.

All arrays indexed by mode use FFT-standard ordering (0, 1, ..., M/2-1, -M/2, ..., -1)
for both bin index ``i`` and wave index ``m``. Use :meth:`FieldGrid.physical_order` to
reorder for output.

The forward transform is

    A_m = M^{-1/2} sum_i exp(-2 pi i m i / M) a_i

so that a wave mode ``m`` carries the ``exp(+i m dk x)`` component of the window
coordinate ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class FieldGrid:
    M: int
    window: float

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2 or self.M % 2:
            raise ValueError(f"M must be an even integer >= 2, got {self.M!r}")
        if not self.window > 0:
            raise ValueError(f"window must be positive, got {self.window!r}")

    @property
    def dz(self) -> float:
        """Bin size (window / M)."""
        return self.window / self.M

    @property
    def dk(self) -> float:
        """Angular-frequency bin (2 pi / window)."""
        return 2 * np.pi / self.window

    @property
    def mode_index(self) -> np.ndarray:
        return np.fft.fftfreq(self.M, d=1.0 / self.M).astype(int)

    @property
    def z(self) -> np.ndarray:
        """Bin centres in FFT order."""
        return self.mode_index * self.dz

    @property
    def k(self) -> np.ndarray:
        """Wave-mode (angular) frequencies in FFT order."""
        return self.mode_index * self.dk

    def physical_order(self, x: np.ndarray, axes=None) -> np.ndarray:
        """Reorder FFT-ordered data to ascending index along ``axes`` (default: all)."""
        return np.fft.fftshift(x, axes=axes)

    def fft_order(self, x: np.ndarray, axes=None) -> np.ndarray:
        return np.fft.ifftshift(x, axes=axes)

    def dft_matrix(self) -> np.ndarray:
        """Dense unitary DFT matrix ``F[m, i]``; for tests and small M only."""
        idx = self.mode_index
        return np.exp(-2j * np.pi * np.outer(idx, idx) / self.M) / np.sqrt(self.M)


def make_grid(M: int, window: float) -> FieldGrid:
    return FieldGrid(M, float(window))


def _check_vector(grid: FieldGrid, v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != (grid.M,):
        raise ValueError(f"expected vector of length {grid.M}, got shape {v.shape}")
    return v


def _check_matrix(grid: FieldGrid, X, name: str) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.shape != (grid.M, grid.M):
        raise ValueError(f"{name}: expected shape {(grid.M, grid.M)}, got {X.shape}")
    return X


def _asym(X: np.ndarray, Y: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(X), initial=0.0)))
    return float(np.max(np.abs(X - Y), initial=0.0)) / scale


def dft_mean(grid: FieldGrid, mean_z) -> np.ndarray:
    """Bin-mode mean vector to wave-mode mean vector."""
    return sfft.fft(_check_vector(grid, mean_z), norm="ortho")


def idft_mean(grid: FieldGrid, mean_k) -> np.ndarray:
    return sfft.ifft(_check_vector(grid, mean_k), norm="ortho")


# The four block transforms below are shared by the propagators, which call them on
# already-validated arrays; they accept stacked leading dimensions.

def fwd_p(X: np.ndarray) -> np.ndarray:
    """``F X F^T`` for an <a a>-type block."""
    return sfft.fft2(X, norm="ortho")


def inv_p(X: np.ndarray) -> np.ndarray:
    return sfft.ifft2(X, norm="ortho")


def fwd_m(X: np.ndarray) -> np.ndarray:
    """``conj(F) X F^T`` for an <a^dag a>-type block."""
    return sfft.fft(sfft.ifft(X, axis=-2, norm="ortho"), axis=-1, norm="ortho")


def inv_m(X: np.ndarray) -> np.ndarray:
    return sfft.ifft(sfft.fft(X, axis=-2, norm="ortho"), axis=-1, norm="ortho")


def dft_covariances(grid: FieldGrid, Cp_z, Cm_z, check: bool = True):
    """Transform (<da da>, <da^dag da>) from bin modes to wave modes.

    ``Cp_k = F Cp F^T`` and ``Cm_k = conj(F) Cm F^T``. Both are computed with row and
    column FFTs, so the cost is O(M^2 log M).
    """
    Cp_z = _check_matrix(grid, Cp_z, "Cp")
    Cm_z = _check_matrix(grid, Cm_z, "Cm")
    if check:
        _check_symmetries(Cp_z, Cm_z)
    return fwd_p(Cp_z), fwd_m(Cm_z)


def idft_covariances(grid: FieldGrid, Cp_k, Cm_k, check: bool = True):
    Cp_k = _check_matrix(grid, Cp_k, "Cp")
    Cm_k = _check_matrix(grid, Cm_k, "Cm")
    if check:
        _check_symmetries(Cp_k, Cm_k)
    return inv_p(Cp_k), inv_m(Cm_k)


def _check_symmetries(Cp, Cm):
    if _asym(Cp, Cp.T) > SYMMETRY_TOL:
        raise ValueError("Cp is not symmetric")
    if _asym(Cm, Cm.conj().T) > SYMMETRY_TOL:
        raise ValueError("Cm is not Hermitian")

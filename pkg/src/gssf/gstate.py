"""Gaussian-state containers for one and two field envelopes.

Moments are stored normal-ordered, per bin (or wave) mode:

    mu[i]    = <a_i>
    Cp[i, j] = <da_i da_j>
    Cm[i, j] = <da_i^dag da_j>

so the vacuum is all zeros. Means are in units of sqrt(photons per bin).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import constants

from . import grid as _grid
from .grid import FieldGrid

HERMITIAN_TOL = 1e-9
PHYSICALITY_TOL = 1e-8

# FWHM of sech^2(t / t0) is 2 arccosh(sqrt 2) t0
SECH2_FWHM = 2 * np.arccosh(np.sqrt(2.0))


def _zeros(grid: FieldGrid):
    return np.zeros((grid.M, grid.M), dtype=complex)


@dataclass
class GaussianEnvelopeState:
    grid: FieldGrid
    mu: np.ndarray
    Cp: np.ndarray
    Cm: np.ndarray
    domain: str = "z"

    def __post_init__(self):
        if self.domain not in ("z", "k"):
            raise ValueError(f"domain must be 'z' or 'k', got {self.domain!r}")
        self.mu = np.asarray(self.mu, dtype=complex)
        self.Cp = np.asarray(self.Cp, dtype=complex)
        self.Cm = np.asarray(self.Cm, dtype=complex)
        M = self.grid.M
        if self.mu.shape != (M,) or self.Cp.shape != (M, M) or self.Cm.shape != (M, M):
            raise ValueError("moment shapes do not match grid")

    def copy(self) -> GaussianEnvelopeState:
        return replace(self, mu=self.mu.copy(), Cp=self.Cp.copy(), Cm=self.Cm.copy())

    def to_k(self) -> GaussianEnvelopeState:
        if self.domain == "k":
            return self
        Cp, Cm = _grid.fwd_p(self.Cp), _grid.fwd_m(self.Cm)
        return GaussianEnvelopeState(self.grid, _grid.dft_mean(self.grid, self.mu), Cp, Cm, "k")

    def to_z(self) -> GaussianEnvelopeState:
        if self.domain == "z":
            return self
        Cp, Cm = _grid.inv_p(self.Cp), _grid.inv_m(self.Cm)
        return GaussianEnvelopeState(self.grid, _grid.idft_mean(self.grid, self.mu), Cp, Cm, "z")

    def to(self, domain: str) -> GaussianEnvelopeState:
        return self.to_k() if domain == "k" else self.to_z()

    def symmetrized(self) -> GaussianEnvelopeState:
        return replace(self, Cp=0.5 * (self.Cp + self.Cp.T), Cm=0.5 * (self.Cm + self.Cm.conj().T))

    def check(self, tol: float = HERMITIAN_TOL):
        check_blocks(self.Cp, self.Cm, tol)


@dataclass
class TwoEnvelopeState:
    """FH envelope ``a`` (field phi) and SH envelope ``b`` (field psi).

    Cross blocks are ``Cp_ab[i, j] = <da_i db_j>`` and ``Cm_ab[i, j] = <da_i^dag db_j>``.
    """

    grid: FieldGrid
    mu_a: np.ndarray
    mu_b: np.ndarray
    Cp_aa: np.ndarray
    Cm_aa: np.ndarray
    Cp_bb: np.ndarray
    Cm_bb: np.ndarray
    Cp_ab: np.ndarray
    Cm_ab: np.ndarray
    domain: str = "z"

    MEANS = ("mu_a", "mu_b")
    P_BLOCKS = ("Cp_aa", "Cp_bb", "Cp_ab")
    M_BLOCKS = ("Cm_aa", "Cm_bb", "Cm_ab")
    BLOCKS = ("Cp_aa", "Cm_aa", "Cp_bb", "Cm_bb", "Cp_ab", "Cm_ab")

    def __post_init__(self):
        if self.domain not in ("z", "k"):
            raise ValueError(f"domain must be 'z' or 'k', got {self.domain!r}")
        M = self.grid.M
        for name in self.MEANS:
            v = np.asarray(getattr(self, name), dtype=complex)
            if v.shape != (M,):
                raise ValueError(f"{name}: expected shape {(M,)}, got {v.shape}")
            setattr(self, name, v)
        for name in self.BLOCKS:
            X = np.asarray(getattr(self, name), dtype=complex)
            if X.shape != (M, M):
                raise ValueError(f"{name}: expected shape {(M, M)}, got {X.shape}")
            setattr(self, name, X)

    def copy(self) -> TwoEnvelopeState:
        kw = {n: getattr(self, n).copy() for n in self.MEANS + self.BLOCKS}
        return replace(self, **kw)

    def _transformed(self, domain, vec, p, m) -> TwoEnvelopeState:
        kw = {n: vec(self.grid, getattr(self, n)) for n in self.MEANS}
        kw.update({n: p(getattr(self, n)) for n in self.P_BLOCKS})
        kw.update({n: m(getattr(self, n)) for n in self.M_BLOCKS})
        return TwoEnvelopeState(self.grid, domain=domain, **kw)

    def to_k(self) -> TwoEnvelopeState:
        if self.domain == "k":
            return self
        return self._transformed("k", _grid.dft_mean, _grid.fwd_p, _grid.fwd_m)

    def to_z(self) -> TwoEnvelopeState:
        if self.domain == "z":
            return self
        return self._transformed("z", _grid.idft_mean, _grid.inv_p, _grid.inv_m)

    def to(self, domain: str) -> TwoEnvelopeState:
        return self.to_k() if domain == "k" else self.to_z()

    def envelope(self, which: str) -> GaussianEnvelopeState:
        """Reduced single-envelope state of ``'a'`` (FH) or ``'b'`` (SH)."""
        if which not in ("a", "b"):
            raise ValueError("envelope must be 'a' or 'b'")
        return GaussianEnvelopeState(
            self.grid,
            getattr(self, f"mu_{which}"),
            getattr(self, f"Cp_{which}{which}"),
            getattr(self, f"Cm_{which}{which}"),
            self.domain,
        )

    def stacked(self):
        """Mean and (Cp, Cm) over the 2M modes (a_1..a_M, b_1..b_M)."""
        mu = np.concatenate([self.mu_a, self.mu_b])
        Cp = np.block([[self.Cp_aa, self.Cp_ab], [self.Cp_ab.T, self.Cp_bb]])
        Cm = np.block([[self.Cm_aa, self.Cm_ab], [self.Cm_ab.conj().T, self.Cm_bb]])
        return mu, Cp, Cm

    def symmetrized(self) -> TwoEnvelopeState:
        return replace(
            self,
            Cp_aa=0.5 * (self.Cp_aa + self.Cp_aa.T),
            Cp_bb=0.5 * (self.Cp_bb + self.Cp_bb.T),
            Cm_aa=0.5 * (self.Cm_aa + self.Cm_aa.conj().T),
            Cm_bb=0.5 * (self.Cm_bb + self.Cm_bb.conj().T),
        )

    def check(self, tol: float = HERMITIAN_TOL):
        check_blocks(self.Cp_aa, self.Cm_aa, tol)
        check_blocks(self.Cp_bb, self.Cm_bb, tol)


@dataclass(frozen=True)
class PulseSpec:
    """Coherent sech^2-intensity pulse; energy in J, times in s, wavelength in m."""

    energy: float
    fwhm: float
    carrier_wavelength: float
    delay: float = 0.0
    phase: float = 0.0
    shape: str = field(default="sech2")

    def __post_init__(self):
        if self.energy < 0:
            raise ValueError("pulse energy must be >= 0")
        if not self.fwhm > 0:
            raise ValueError("pulse fwhm must be > 0")
        if self.shape != "sech2":
            raise ValueError(f"unsupported pulse shape {self.shape!r}")

    @property
    def photon_energy(self) -> float:
        return constants.h * constants.c / self.carrier_wavelength

    @property
    def photon_number(self) -> float:
        return self.energy / self.photon_energy


def check_blocks(Cp, Cm, tol=HERMITIAN_TOL):
    scale = max(1.0, float(np.max(np.abs(Cp), initial=0)), float(np.max(np.abs(Cm), initial=0)))
    if np.max(np.abs(Cp - Cp.T), initial=0) > tol * scale:
        raise ValueError("Cp is not symmetric")
    if np.max(np.abs(Cm - Cm.conj().T), initial=0) > tol * scale:
        raise ValueError("Cm is not Hermitian")
    if np.min(np.diag(Cm).real, initial=0) < -tol * scale:
        raise ValueError("Cm has negative diagonal")


def vacuum(grid: FieldGrid) -> GaussianEnvelopeState:
    return GaussianEnvelopeState(grid, np.zeros(grid.M, complex), _zeros(grid), _zeros(grid))


def two_envelope_vacuum(grid: FieldGrid) -> TwoEnvelopeState:
    z = np.zeros(grid.M, complex)
    return TwoEnvelopeState(grid, z, z.copy(), *(_zeros(grid) for _ in range(6)))


def coherent_pulse(grid: FieldGrid, spec: PulseSpec) -> GaussianEnvelopeState:
    """Coherent sech pulse on a grid whose coordinate is local time in seconds."""
    state = vacuum(grid)
    n = spec.photon_number
    if n == 0:
        return state
    t0 = spec.fwhm / SECH2_FWHM
    amp = 1 / np.cosh((grid.z - spec.delay) / t0)
    edge = max(abs(amp[grid.M // 2]), abs(amp[grid.M // 2 - 1]))
    if edge > 1e-6 * np.max(amp):
        raise ValueError("pulse does not fit in the window (edge amplitude > 1e-6 of peak)")
    amp *= np.sqrt(n / np.sum(amp**2))
    state.mu = amp * np.exp(1j * spec.phase)
    return state


def photon_number(state: GaussianEnvelopeState) -> float:
    return float(np.sum(np.abs(state.mu) ** 2) + np.sum(np.diag(state.Cm).real))


def envelope_photon_numbers(state: TwoEnvelopeState):
    return photon_number(state.envelope("a")), photon_number(state.envelope("b"))


def manley_rowe(state: TwoEnvelopeState) -> float:
    n_a, n_b = envelope_photon_numbers(state)
    return n_a + 2 * n_b


def symplectic_form(N: int) -> np.ndarray:
    I = np.eye(N)
    Z = np.zeros((N, N))
    return np.block([[Z, I], [-I, Z]])


def quadrature_from_moments(Cp, Cm) -> np.ndarray:
    """Symmetrized covariance of z = (q_1..q_N, p_1..p_N) with q = (c + c^dag)/sqrt 2."""
    N = Cp.shape[0]
    half = 0.5 * np.eye(N)
    Sqq = half + Cm.real + Cp.real
    Spp = half + Cm.real - Cp.real
    Sqp = Cp.imag + Cm.imag
    S = np.block([[Sqq, Sqp], [Sqp.T, Spp]])
    return 0.5 * (S + S.T)


def moments_from_quadrature(Sigma):
    """Inverse of :func:`quadrature_from_moments`."""
    N = Sigma.shape[0] // 2
    Sqq, Spp, Sqp = Sigma[:N, :N], Sigma[N:, N:], Sigma[:N, N:]
    Cp = 0.5 * (Sqq - Spp) + 0.5j * (Sqp + Sqp.T)
    Cm = 0.5 * (Sqq + Spp) - 0.5 * np.eye(N) + 0.5j * (Sqp - Sqp.T)
    return Cp, Cm


def to_quadrature_covariance(state, check: bool = True) -> np.ndarray:
    """Quadrature covariance of a one- or two-envelope state (FH modes first)."""
    if isinstance(state, TwoEnvelopeState):
        _, Cp, Cm = state.stacked()
    else:
        Cp, Cm = state.Cp, state.Cm
    if check:
        check_blocks(Cp, Cm)
    return quadrature_from_moments(Cp, Cm)


def physicality_margin(Sigma) -> float:
    """Smallest eigenvalue of Sigma + (i/2) Omega; >= 0 for a physical state."""
    N = Sigma.shape[0] // 2
    return float(np.linalg.eigvalsh(Sigma + 0.5j * symplectic_form(N))[0])


def is_physical(Sigma, tol: float = PHYSICALITY_TOL) -> bool:
    return physicality_margin(Sigma) >= -tol


def fluorescence_spectrum(state: GaussianEnvelopeState) -> np.ndarray:
    """Per-wave-mode fluctuation photon number <dA_m^dag dA_m>, FFT order."""
    return np.diag(state.to_k().Cm).real.copy()

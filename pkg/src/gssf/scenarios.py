"""Waveguide device scenarios in physical units.

The grid coordinate is local time (s) in the FH group-velocity frame and the evolution
variable is propagation distance (m). Spectral components follow exp(+i w tau), so
wave mode m sits at absolute frequency f_carrier + m / window.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import constants

from .chi2 import Chi2Params
from .dispersion import DispersionSpec
from .grid import FieldGrid, make_grid
from .gstate import PulseSpec, TwoEnvelopeState, coherent_pulse, two_envelope_vacuum

log = logging.getLogger(__name__)

FS = 1e-15
MM = 1e-3


def field_decay_rate(db_per_m: float) -> float:
    """Field amplitude decay rate (1/m) for a power attenuation in dB/m."""
    return db_per_m * np.log(10) / 20


def eps_from_efficiency(eta0_per_W_cm2: float, wavelength: float) -> float:
    """Continuum coupling eps (m^-1 s^-1/2) from the normalized SHG efficiency.

    Chosen so that undepleted CW second-harmonic generation gives
    P_SH = eta0 L^2 P_FH^2 with photon-flux-normalized fields.
    """
    if eta0_per_W_cm2 < 0:
        raise ValueError("SHG efficiency must be >= 0")
    eta0 = eta0_per_W_cm2 * 1e4  # W^-1 cm^-2 -> W^-1 m^-2
    omega = 2 * np.pi * constants.c / wavelength
    return float(np.sqrt(2 * constants.hbar * omega * eta0))


def fh_loss_profile(freqs, base_db_per_m=30.0, cutoff_nm=2900.0, ramp_nm=50.0,
                    high_db_per_m=2000.0):
    """Field decay rate versus absolute frequency (Hz).

    Constant ``base`` below the cutoff wavelength, a half-cosine rise over ``ramp_nm``
    to ``high`` beyond it; non-positive frequencies get ``high``.
    """
    freqs = np.asarray(freqs, float)
    k_lo, k_hi = field_decay_rate(base_db_per_m), field_decay_rate(high_db_per_m)
    lam = np.full(freqs.shape, np.inf)
    pos = freqs > 0
    lam[pos] = constants.c / freqs[pos] * 1e9
    x = np.clip((lam - cutoff_nm) / ramp_nm, 0.0, 1.0)
    return k_lo + (k_hi - k_lo) * 0.5 * (1 - np.cos(np.pi * x))


@dataclass(frozen=True)
class Chi2Scenario:
    """Device, input and numerical parameters; units are in the field names."""

    name: str = "opg"
    wavelength_nm: float = 2090.0
    shg_efficiency_per_W_cm2: float = 10.0
    length_mm: float = 5.0
    phase_mismatch_pi_over_L: float = 0.0
    mismatch_sign: int = 1
    gvm_fs_mm: float = 2.0
    gvd_fh_fs2_mm: float = 10.0
    gvd_sh_fs2_mm: float = 100.0
    tod_fh_fs3_mm: float = 0.0
    tod_sh_fs3_mm: float = 0.0
    fh_energy_pJ: float = 0.0
    fh_fwhm_fs: float = 0.0
    sh_energy_pJ: float = 3.0
    sh_fwhm_fs: float = 100.0
    fh_loss_db_m: float = 30.0
    fh_loss_high_db_m: float = 2000.0
    loss_cutoff_nm: float = 2900.0
    loss_ramp_nm: float = 50.0
    sh_loss_db_m: float = 0.0
    loss: bool = True
    M: int = 1024
    window_ps: float = 2.0
    steps: int = 200
    mode: str = "opg-reduced"

    def __post_init__(self):
        if self.mismatch_sign not in (1, -1):
            raise ValueError("mismatch_sign must be +1 or -1")
        for key in ("wavelength_nm", "length_mm", "window_ps"):
            if not getattr(self, key) > 0:
                raise ValueError(f"{key} must be > 0")

    @property
    def length(self) -> float:
        return self.length_mm * MM

    @property
    def carrier_fh(self) -> float:
        return constants.c / (self.wavelength_nm * 1e-9)

    @property
    def phase_mismatch(self) -> float:
        """Delta beta_0 in 1/m."""
        return self.mismatch_sign * self.phase_mismatch_pi_over_L * np.pi / self.length

    @property
    def eps(self) -> float:
        return eps_from_efficiency(self.shg_efficiency_per_W_cm2, self.wavelength_nm * 1e-9)

    def grid(self) -> FieldGrid:
        return make_grid(self.M, self.window_ps * 1e-12)

    def frequencies(self, grid: FieldGrid):
        """Absolute FH and SH frequencies (Hz) per wave mode, FFT order."""
        off = grid.k / (2 * np.pi)
        return self.carrier_fh + off, 2 * self.carrier_fh + off

    def dispersion(self, grid: FieldGrid):
        w = grid.k
        c2 = FS**2 / MM
        c3 = FS**3 / MM
        om_a = 0.5 * self.gvd_fh_fs2_mm * c2 * w**2 + self.tod_fh_fs3_mm * c3 * w**3 / 6
        om_b = (self.phase_mismatch + self.gvm_fs_mm * FS / MM * w
                + 0.5 * self.gvd_sh_fs2_mm * c2 * w**2 + self.tod_sh_fs3_mm * c3 * w**3 / 6)
        if self.loss:
            f_a, _ = self.frequencies(grid)
            k_a = fh_loss_profile(f_a, self.fh_loss_db_m, self.loss_cutoff_nm,
                                  self.loss_ramp_nm, self.fh_loss_high_db_m)
            k_b = field_decay_rate(self.sh_loss_db_m)
        else:
            k_a = k_b = 0.0
        return DispersionSpec(om_a, k_a), DispersionSpec(om_b, k_b)

    def initial_state(self, grid: FieldGrid) -> TwoEnvelopeState:
        st = two_envelope_vacuum(grid)
        lam = self.wavelength_nm * 1e-9
        if self.fh_energy_pJ > 0:
            st.mu_a = coherent_pulse(grid, PulseSpec(self.fh_energy_pJ * 1e-12,
                                                     self.fh_fwhm_fs * FS, lam)).mu
        if self.sh_energy_pJ > 0:
            st.mu_b = coherent_pulse(grid, PulseSpec(self.sh_energy_pJ * 1e-12,
                                                     self.sh_fwhm_fs * FS, lam / 2)).mu
        return st

    def params(self, grid: FieldGrid, steps: int | None = None) -> Chi2Params:
        disp_a, disp_b = self.dispersion(grid)
        return Chi2Params(self.eps / np.sqrt(grid.dz), disp_a, disp_b, self.length,
                          steps or self.steps, self.mode)

    def build(self):
        g = self.grid()
        return g, self.initial_state(g), self.params(g)

    def with_(self, **kw) -> Chi2Scenario:
        return replace(self, **kw)

    def as_dict(self):
        return asdict(self)


# vacuum-seeded optical parametric generation in a 5 mm waveguide
OPG = Chi2Scenario()

# second-order supercontinuum from a 5 pJ FH pump in a 6 mm waveguide
SCG = Chi2Scenario(
    name="scg",
    length_mm=6.0,
    phase_mismatch_pi_over_L=-3.0,
    gvm_fs_mm=10.0,
    gvd_fh_fs2_mm=-15.0,
    gvd_sh_fs2_mm=100.0,
    tod_fh_fs3_mm=500.0,
    tod_sh_fs3_mm=1000.0,
    fh_energy_pJ=5.0,
    fh_fwhm_fs=50.0,
    sh_energy_pJ=0.0,
    sh_fwhm_fs=0.0,
    window_ps=2.0,
    steps=200,
    mode="full",
)

PRESETS = {"opg": OPG, "scg": SCG}


@dataclass
class Spectra:
    """Per-pulse energy spectral densities (J/Hz) on absolute frequency, ascending."""

    f_a: np.ndarray
    esd_a: np.ndarray
    f_b: np.ndarray
    esd_b: np.ndarray
    fluor_a: np.ndarray = field(default=None)


def spectra(scn: Chi2Scenario, state: TwoEnvelopeState) -> Spectra:
    """ESD of both envelopes, including fluctuation photons, from a state."""
    grid = state.grid
    k = state.to_k()
    f_a, f_b = scn.frequencies(grid)
    df = 1.0 / grid.window
    n_a = np.abs(k.mu_a) ** 2 + np.diagonal(k.Cm_aa).real
    n_b = np.abs(k.mu_b) ** 2 + np.diagonal(k.Cm_bb).real
    h = constants.h
    o = grid.physical_order
    return Spectra(o(f_a), o(n_a * h * f_a / df), o(f_b), o(n_b * h * f_b / df),
                   o(np.diagonal(k.Cm_aa).real * h * f_a / df))


def sh_energy(scn: Chi2Scenario, state: TwoEnvelopeState) -> float:
    """SH pulse energy (J) at the SH carrier photon energy."""
    n = np.sum(np.abs(state.mu_b) ** 2) + np.trace(state.Cm_bb).real
    return float(n * constants.h * 2 * scn.carrier_fh)


def spectral_overlap(sp: Spectra, floor_db: float = -40.0):
    """Absolute frequencies where both envelopes exceed ``floor_db`` of their own peak."""
    fa = sp.esd_a > sp.esd_a.max() * 10 ** (floor_db / 10)
    fb = sp.esd_b > sp.esd_b.max() * 10 ** (floor_db / 10)
    lo = max(sp.f_a[0], sp.f_b[0])
    hi = min(sp.f_a[-1], sp.f_b[-1])
    if lo >= hi:
        return np.array([])
    common = np.linspace(lo, hi, 4 * len(sp.f_a))
    ia = np.interp(common, sp.f_a, fa.astype(float)) > 0.5
    ib = np.interp(common, sp.f_b, fb.astype(float)) > 0.5
    return common[ia & ib]

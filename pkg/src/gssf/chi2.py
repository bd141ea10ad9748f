"""Two-envelope Gaussian split-step propagation in a chi(2) waveguide.

Envelope ``a`` is the fundamental harmonic (FH) and ``b`` the second harmonic (SH).
Nonlinear Hamiltonian per bin: (eps_bin / 2)(i b a^dag^2 - i b^dag a^2), so that
``a' = eps_bin b a^dag`` and ``b' = -(eps_bin / 2) a^2``. Derivatives below are with
respect to the propagation variable, already multiplied by ``eps_bin``.

Tuple layout of the full model (bin modes):
``(mu_a, mu_b, Cp_aa, Cm_aa, Cp_bb, Cm_bb, Cp_ab, Cm_ab)``.
The reduced vacuum-seeded OPG model keeps only ``(mu_b, Cp_aa, Cm_aa)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from . import _kernels
from . import grid as _grid
from .dispersion import DispersionSpec
from .gstate import TwoEnvelopeState
from .stepper import StepPlan, Trajectory, integrate

log = logging.getLogger(__name__)

MODES = ("full", "opg-reduced")
BACKENDS = ("numba", "numpy")
FIELDS = TwoEnvelopeState.MEANS + TwoEnvelopeState.BLOCKS


@dataclass
class Chi2Params:
    """``eps_bin`` is the per-bin coupling eps / sqrt(dz); ``length`` is the propagation extent."""

    eps_bin: float
    disp_a: DispersionSpec
    disp_b: DispersionSpec
    length: float
    steps: int
    mode: str = "full"
    scheme: str = "rk4ip"
    backend: str = "numba"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}")
        if not self.eps_bin >= 0:
            raise ValueError("eps_bin must be >= 0")
        if self.disp_a.omega.shape != self.disp_b.omega.shape:
            raise ValueError("FH and SH dispersion must live on the same grid")

    @property
    def lossless(self) -> bool:
        return self.disp_a.lossless and self.disp_b.lossless


def nl_arrays(y, eps):
    a, b, Paa, Maa, Pbb, Mbb, Pab, Mab = y
    ac, bc = np.conj(a), np.conj(b)
    da = eps * (b * ac + np.diagonal(Mab))
    db = -0.5 * eps * (a * a + np.diagonal(Paa))

    dPaa = ac[:, None] * Pab.T + b[:, None] * Maa + ac[None, :] * Pab + b[None, :] * Maa.T
    dPaa[np.diag_indices_from(dPaa)] += b
    dMaa = (bc[:, None] * Paa + a[:, None] * np.conj(Mab.T)
            + b[None, :] * np.conj(Paa) + ac[None, :] * Mab)
    dPbb = -(a[:, None] * Pab + a[None, :] * Pab.T)
    dMbb = -(ac[:, None] * Mab + a[None, :] * np.conj(Mab.T))
    dPab = b[:, None] * Mab + ac[:, None] * Pbb - a[None, :] * Paa
    dMab = bc[:, None] * Pab + a[:, None] * Mbb - a[None, :] * Maa
    out = [da, db, dPaa, dMaa, dPbb, dMbb, dPab, dMab]
    for X in out[2:]:
        X *= eps
    return tuple(out)


def opg_arrays(y, eps):
    b, Paa, Maa = y
    db = -0.5 * eps * np.diagonal(Paa)
    dPaa = b[:, None] * Maa + b[None, :] * Maa.T
    dPaa[np.diag_indices_from(dPaa)] += b
    dPaa *= eps
    dMaa = np.conj(b)[:, None] * Paa + b[None, :] * np.conj(Paa)
    dMaa *= eps
    return db, dPaa, dMaa


def chi2_nl_rhs(state: TwoEnvelopeState, eps_bin: float) -> TwoEnvelopeState:
    """Full nonlinear derivative of a bin-mode two-envelope state."""
    if state.domain != "z":
        raise ValueError("chi2_nl_rhs needs a z-space state")
    d = nl_arrays(tuple(getattr(state, n) for n in FIELDS), eps_bin)
    return TwoEnvelopeState(state.grid, *d, domain="z")


def opg_rhs(mu_b, Cp_aa, Cm_aa, eps_bin, mu_a=None):
    """Reduced vacuum-seeded OPG derivatives ``(dmu_b, dCp_aa, dCm_aa)``."""
    if mu_a is not None and np.any(mu_a != 0):
        raise ValueError("the OPG reduction requires a vacuum signal mean (mu_a = 0)")
    return opg_arrays((np.asarray(mu_b), np.asarray(Cp_aa), np.asarray(Cm_aa)), eps_bin)


class TwoLinearMap:
    """Exact per-block dispersion/loss maps; P-type blocks use e_m e_n, M-type conj(e_m) e_n."""

    def __init__(self, disp_a: DispersionSpec, disp_b: DispersionSpec, mode: str = "full"):
        self.disp_a, self.disp_b, self.mode = disp_a, disp_b, mode
        self._cache = {}

    def factors(self, h):
        if h not in self._cache:
            ea, eb = self.disp_a.factor(h), self.disp_b.factor(h)
            if self.mode == "full":
                outer = np.multiply.outer
                self._cache[h] = (
                    ea, eb,
                    np.stack([outer(ea, ea), outer(eb, eb), outer(ea, eb)]),
                    np.stack([outer(ea.conj(), ea), outer(eb.conj(), eb), outer(ea.conj(), eb)]),
                )
            else:
                self._cache[h] = (None, eb, np.multiply.outer(ea, ea),
                                  np.multiply.outer(ea.conj(), ea))
        return self._cache[h]

    def k_space(self, y, h):
        ea, eb, fp, fm = self.factors(h)
        if self.mode == "full":
            a, b, Paa, Maa, Pbb, Mbb, Pab, Mab = y
            return (a * ea, b * eb, Paa * fp[0], Maa * fm[0], Pbb * fp[1], Mbb * fm[1],
                    Pab * fp[2], Mab * fm[2])
        b, Paa, Maa = y
        return b * eb, Paa * fp, Maa * fm

    def __call__(self, y, h):
        ea, eb, fp, fm = self.factors(h)

        def vec(v, e):
            return sfft.ifft(sfft.fft(v, norm="ortho") * e, norm="ortho")

        if self.mode == "full":
            a, b, Paa, Maa, Pbb, Mbb, Pab, Mab = y
            P = _grid.inv_p(_grid.fwd_p(np.stack([Paa, Pbb, Pab])) * fp)
            Mx = _grid.inv_m(_grid.fwd_m(np.stack([Maa, Mbb, Mab])) * fm)
            return vec(a, ea), vec(b, eb), P[0], Mx[0], P[1], Mx[1], P[2], Mx[2]
        b, Paa, Maa = y
        return vec(b, eb), _grid.inv_p(_grid.fwd_p(Paa) * fp), _grid.inv_m(_grid.fwd_m(Maa) * fm)


def chi2_linear_step(state: TwoEnvelopeState, disp_a: DispersionSpec, disp_b: DispersionSpec,
                     dt: float) -> TwoEnvelopeState:
    """Exact linear evolution of a wave-mode two-envelope state over ``dt``."""
    if state.domain != "k":
        raise ValueError("chi2_linear_step needs a k-space state")
    if dt < 0:
        raise ValueError("dt must be >= 0")
    y = TwoLinearMap(disp_a, disp_b).k_space(tuple(getattr(state, n) for n in FIELDS), dt)
    return TwoEnvelopeState(state.grid, *y, domain="k")


def _mr_full(y):
    a, b, _, Maa, _, Mbb, _, _ = y
    return (np.sum(np.abs(a) ** 2) + np.trace(Maa).real
            + 2 * (np.sum(np.abs(b) ** 2) + np.trace(Mbb).real))


def _mr_opg(y):
    b, _, Maa = y
    return np.trace(Maa).real + 2 * np.sum(np.abs(b) ** 2)


def _sym_full(y):
    a, b, Paa, Maa, Pbb, Mbb, Pab, Mab = y
    return (a, b, 0.5 * (Paa + Paa.T), 0.5 * (Maa + Maa.conj().T),
            0.5 * (Pbb + Pbb.T), 0.5 * (Mbb + Mbb.conj().T), Pab, Mab)


def _sym_opg(y):
    b, Paa, Maa = y
    return b, 0.5 * (Paa + Paa.T), 0.5 * (Maa + Maa.conj().T)


def expand_opg(grid, y, zero=None) -> TwoEnvelopeState:
    """Full two-envelope state from reduced OPG arrays; absent blocks share one zero array."""
    b, Paa, Maa = y
    M = grid.M
    Z = np.zeros((M, M), complex) if zero is None else zero
    return TwoEnvelopeState(grid, np.zeros(M, complex), b, Paa, Maa, Z, Z, Z, Z, domain="z")


def chi2_propagate(state: TwoEnvelopeState, params: Chi2Params, checkpoints=(),
                   label="chi2") -> Trajectory:
    """Propagate over ``params.length``; returns z-space states at ``checkpoints``."""
    state = state.to_z()
    grid = state.grid
    if params.disp_a.omega.shape != (grid.M,):
        raise ValueError("dispersion does not match the grid")
    eps = params.eps_bin
    plan = StepPlan(params.length, params.steps, params.scheme, tuple(checkpoints) + (0,))
    log.info("%s: M=%d steps=%d dz=%.4g mode=%s eps_bin=%.4g", label, grid.M, params.steps,
             plan.dt, params.mode, eps)
    lin = TwoLinearMap(params.disp_a, params.disp_b, params.mode)
    fast = params.backend == "numba"
    if params.mode == "full":
        y0 = tuple(getattr(state, n) for n in FIELDS)
        rhs = (lambda y: _kernels.chi2_rhs(*y, eps)) if fast else (lambda y: nl_arrays(y, eps))
        return integrate(
            y0, rhs, lin, plan,
            symmetrize=_sym_full, invariant=_mr_full, lossless=params.lossless,
            wrap=lambda y: TwoEnvelopeState(grid, *y, domain="z"), label=label,
        )
    if np.any(state.mu_a != 0):
        raise ValueError("the OPG reduction requires a vacuum signal mean (mu_a = 0)")
    dropped = [n for n in ("Cp_bb", "Cm_bb", "Cp_ab", "Cm_ab") if np.any(getattr(state, n))]
    if dropped:
        raise ValueError(f"the OPG reduction requires zero {', '.join(dropped)}")
    zero = np.zeros((grid.M, grid.M), complex)
    zero.flags.writeable = False
    rhs = (lambda y: _kernels.opg_rhs(*y, eps)) if fast else (lambda y: opg_arrays(y, eps))
    return integrate(
        (state.mu_b, state.Cp_aa, state.Cm_aa), rhs, lin, plan,
        symmetrize=_sym_opg, invariant=_mr_opg, lossless=params.lossless,
        wrap=lambda y: expand_opg(grid, y, zero), label=label,
    )

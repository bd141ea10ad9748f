"""Carrier-envelope-offset (f-2f) beat-note signal and noise for a two-envelope comb state.

Comb lines are the wave modes of the grid: FH line m sits at (m + m0) f_rep + f_ceo and
SH line q at (q + 2 m0) f_rep + 2 f_ceo, with f_rep = 1 / window. FH line m beats with
SH line q(m) = m - m0. Everything is reported per pulse (photocurrents divided by f_rep).
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .gstate import GaussianEnvelopeState, TwoEnvelopeState

log = logging.getLogger(__name__)

EDGE_TOL = 1e-6


def sinc(x):
    """Unnormalized sinc, sin(x) / x."""
    return np.sinc(np.asarray(x) / np.pi)


@dataclass(frozen=True)
class CombSpec:
    f_rep: float
    f_ceo: float
    m0: int

    def __post_init__(self):
        if not self.f_rep > 0:
            raise ValueError("f_rep must be > 0")
        if not 0 < self.f_ceo < self.f_rep:
            raise ValueError("f_ceo must lie in (0, f_rep)")

    @property
    def phi_ceo(self) -> float:
        return 2 * np.pi * self.f_ceo / self.f_rep

    def q(self, m):
        return np.asarray(m) - self.m0

    @classmethod
    def for_grid(cls, window: float, carrier_fh: float, phi_ceo: float = np.pi / 3):
        """Comb whose line spacing is the grid resolution 1 / window."""
        f_rep = 1.0 / window
        return cls(f_rep, phi_ceo / (2 * np.pi) * f_rep, int(round(carrier_fh / f_rep)))


def _ordered_cov(Cp, Cm, i, di, j, dj):
    """<d x d y> for x = c_i (c_i^dag if di) and y likewise, with normal-ordered blocks."""
    if not di and not dj:
        return Cp[i, j]
    if di and not dj:
        return Cm[i, j]
    if not di and dj:
        return Cm[j, i] + (1.0 if i == j else 0.0)
    return np.conj(Cp[i, j])


def fourth_moment(mu, Cp, Cm, labels) -> complex:
    """<x u v y> - <x y><u v> for a Gaussian state with moments (mu, Cp, Cm).

    ``labels`` is four ``(mode, dagger)`` pairs in operator order.
    """
    if len(labels) != 4:
        raise ValueError("need exactly four labels")
    n = len(mu)
    for mode, _ in labels:
        if not 0 <= mode < n:
            raise IndexError(f"mode {mode} out of range [0, {n})")
    bar = [np.conj(mu[i]) if d else mu[i] for i, d in labels]
    (x, dx), (u, du), (v, dv), (y, dy) = labels
    xu = _ordered_cov(Cp, Cm, x, dx, u, du)
    vy = _ordered_cov(Cp, Cm, v, dv, y, dy)
    xv = _ordered_cov(Cp, Cm, x, dx, v, dv)
    uy = _ordered_cov(Cp, Cm, u, du, y, dy)
    xb, ub, vb, yb = bar
    return complex((xb * ub + xu) * vy + vb * yb * xu + (xb * vb + xv) * uy + ub * yb * xv)


def fourth_moment_reduced(state, labels) -> complex:
    """Reduced fourth moment on a state; labels are ``(envelope, mode, dagger)``.

    ``envelope`` is ``'a'`` or ``'b'``; ``mode`` is a signed wave/bin index of the state's
    current domain (negative indices wrap as in FFT order).
    """
    if isinstance(state, GaussianEnvelopeState):
        mu, Cp, Cm = state.mu, state.Cp, state.Cm
        offsets = {"a": 0}
    else:
        mu, Cp, Cm = state.stacked()
        offsets = {"a": 0, "b": state.grid.M}
    M = state.grid.M
    flat = []
    for env, idx, dag in labels:
        if env not in offsets:
            raise IndexError(f"unknown envelope {env!r}")
        if not -M // 2 <= idx < M:
            raise IndexError(f"mode {idx} out of range for M={M}")
        flat.append((offsets[env] + idx % M, bool(dag)))
    return fourth_moment(mu, Cp, Cm, flat)


@dataclass
class HeterodyneReport:
    """Per-line beat-note signal and noise, all per pulse.

    ``m`` are FH line indices (ascending), ``freq`` the beat optical frequencies (Hz).
    """

    m: np.ndarray
    freq: np.ndarray
    S: np.ndarray
    N0: np.ndarray
    N_shot: np.ndarray
    N_para: np.ndarray
    N1: np.ndarray
    N2: np.ndarray
    phi_ceo: float
    total_signal: float = 0.0
    total_variance: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def correlation_map(self) -> np.ndarray:
        return self.N1 + self.N2

    def offdiagonal_weight(self) -> float:
        """Frobenius norm of the off-diagonal part of N1 + N2 relative to the whole."""
        C = self.correlation_map
        tot = np.linalg.norm(C)
        return float(np.linalg.norm(C - np.diag(np.diag(C))) / tot) if tot else 0.0


def _lines(state: TwoEnvelopeState, comb: CombSpec):
    M = state.grid.M
    m = np.arange(-M // 2, M // 2)
    q = comb.q(m)
    keep = (q >= -M // 2) & (q < M // 2)
    return m[keep], q[keep]


def ceo_signal(state: TwoEnvelopeState, comb: CombSpec):
    """Per-line S(m) = Re<A_m^dag B_q(m)> and its sum (the per-pulse photocurrent)."""
    if state.domain != "k":
        raise ValueError("ceo_signal needs a k-space state")
    M = state.grid.M
    m, q = _lines(state, comb)
    im, iq = m % M, q % M
    S = (np.conj(state.mu_a[im]) * state.mu_b[iq] + state.Cm_ab[im, iq]).real
    return m, S, float(S.sum())


def ceo_noise(state: TwoEnvelopeState, comb: CombSpec) -> HeterodyneReport:
    """Signal, shot and parametric noise, and the line-line correlation matrices N1, N2."""
    if state.domain != "k":
        raise ValueError("ceo_noise needs a k-space state")
    phi = comb.phi_ceo
    for edge in (np.pi / 2, np.pi, 3 * np.pi / 2):
        if abs(phi - edge) < EDGE_TOL:
            warnings.warn(f"phi_ceo={phi:.8f} is at an excluded edge case ({edge:.6f})",
                          RuntimeWarning, stacklevel=2)
    M = state.grid.M
    m, q = _lines(state, comb)
    im, iq = m % M, q % M
    a, b = state.mu_a[im], state.mu_b[iq]
    ac = np.conj(a)
    Paa = state.Cp_aa[np.ix_(im, im)]
    Maa = state.Cm_aa[np.ix_(im, im)]
    Pbb = state.Cp_bb[np.ix_(iq, iq)]
    Mbb = state.Cm_bb[np.ix_(iq, iq)]
    Pab = state.Cp_ab[np.ix_(im, iq)]
    Mab = state.Cm_ab[np.ix_(im, iq)]

    # N1: x = A_m^dag, u = A_m'^dag, v = B_q', y = B_q   (rows m, columns m')
    xu = np.conj(Paa)
    vy = Pbb.T
    xv = Mab
    uy = Mab.T
    xb, ub, vb, yb = ac[:, None], ac[None, :], b[None, :], b[:, None]
    N1 = ((xb * ub + xu) * vy + vb * yb * xu + (xb * vb + xv) * uy + ub * yb * xv).real

    # N2: x = A_m^dag, u = A_m', v = B_q'^dag, y = B_q
    xu = Maa
    vy = Mbb.T
    xv = np.conj(Pab)
    uy = Pab.T
    ub, vb = a[None, :], np.conj(b)[None, :]
    N2 = ((xb * ub + xu) * vy + vb * yb * xu + (xb * vb + xv) * uy + ub * yb * xv).real

    fl_a = np.diagonal(state.Cm_aa).real[im]
    fl_b = np.diagonal(state.Cm_bb).real[iq]
    shot = np.abs(a) ** 2 + np.abs(b) ** 2
    N0 = shot + fl_a + fl_b
    para = fl_a + fl_b + np.diagonal(N1) + np.diagonal(N2)
    S = (ac * b + state.Cm_ab[im, iq]).real
    factor = 1 + sinc(phi) ** 2
    total = float(N0.sum() + 0.5 * N1.sum() + 0.5 * N2.sum() * factor)
    freq = (m + comb.m0) * comb.f_rep + comb.f_ceo
    return HeterodyneReport(
        m=m, freq=freq, S=S, N0=N0, N_shot=shot, N_para=para, N1=N1, N2=N2, phi_ceo=phi,
        total_signal=float(S.sum()), total_variance=total,
        meta={"sinc": "sin(x)/x", "n2_factor": float(factor), "f_rep": comb.f_rep,
              "f_ceo": comb.f_ceo, "m0": comb.m0, "per": "pulse"},
    )

"""Dense truncated-Fock reference simulator for one or two modes.

Independent of the Gaussian code paths: states are density matrices, dynamics are
RK4 steps of the Lindblad master equation, and moments are traces against explicit
operator matrices. Two-mode bases are ``kron(mode_a, mode_b)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .kerr0d import KerrTrajectory

TRUNCATION_TOL = 1e-6


class TruncationError(RuntimeError):
    pass


def destroy(D: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, D, dtype=float)), 1).astype(complex)


def coherent_ket(alpha: complex, D: int) -> np.ndarray:
    n = np.arange(D)
    logfact = np.array([math.lgamma(k + 1) for k in n])
    with np.errstate(divide="ignore"):
        logmag = n * np.log(abs(alpha)) if alpha != 0 else np.where(n == 0, 0.0, -np.inf)
    c = np.exp(logmag - 0.5 * logfact - 0.5 * abs(alpha) ** 2) * np.exp(1j * n * np.angle(alpha))
    return c.astype(complex)


def thermal_rho(n_th: float, D: int) -> np.ndarray:
    if n_th == 0:
        p = np.zeros(D)
        p[0] = 1
    else:
        x = n_th / (1 + n_th)
        p = (1 - x) * x ** np.arange(D)
    return np.diag(p).astype(complex)


@dataclass
class FockState:
    dims: tuple
    rho: np.ndarray

    def ops(self):
        """Annihilation operators of each mode on the full space."""
        mats = []
        for k, D in enumerate(self.dims):
            parts = [np.eye(d) for d in self.dims]
            parts[k] = destroy(D)
            op = parts[0]
            for p in parts[1:]:
                op = np.kron(op, p)
            mats.append(op)
        return mats

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.trace(self.rho @ op))

    def top_population(self) -> float:
        """Largest population in the highest Fock level of any mode."""
        pops = np.diag(self.rho).real.reshape(self.dims)
        worst = 0.0
        for k in range(len(self.dims)):
            marg = pops.sum(axis=tuple(j for j in range(len(self.dims)) if j != k))
            worst = max(worst, float(marg[-1]))
        return worst

    def check(self, tol: float = 1e-9):
        if abs(np.trace(self.rho) - 1) > tol:
            raise ValueError("trace(rho) != 1")
        if np.max(np.abs(self.rho - self.rho.conj().T)) > tol:
            raise ValueError("rho is not Hermitian")
        if np.linalg.eigvalsh(self.rho)[0] < -tol:
            raise ValueError("rho is not positive semidefinite")


def guard(state: FockState, tol: float = TRUNCATION_TOL):
    top = state.top_population()
    if top > tol:
        raise TruncationError(
            f"top Fock level population {top:.2e} exceeds {tol:.0e}; increase the truncation D"
        )


def product_state(*kets_or_rhos) -> FockState:
    rho = np.ones((1, 1), complex)
    dims = []
    for x in kets_or_rhos:
        x = np.asarray(x, complex)
        r = np.outer(x, x.conj()) if x.ndim == 1 else x
        dims.append(r.shape[0])
        rho = np.kron(rho, r)
    return FockState(tuple(dims), rho)


def _lindblad_rhs(H, Ls):
    LdL = [L.conj().T @ L for L in Ls]

    def f(rho):
        out = -1j * (H @ rho - rho @ H)
        for L, A in zip(Ls, LdL):
            out += L @ rho @ L.conj().T - 0.5 * (A @ rho + rho @ A)
        return out

    return f


def master_evolve(state: FockState, H, Ls, t_grid, max_step: float):
    """RK4 on the master equation; returns the list of states at ``t_grid``."""
    f = _lindblad_rhs(H, Ls)
    rho = state.rho.copy()
    t_grid = np.asarray(t_grid, float)
    out = []
    t = 0.0
    for t_next in t_grid:
        span = t_next - t
        if span < 0:
            raise ValueError("t_grid must be non-decreasing and start at >= 0")
        n = max(1, int(np.ceil(span / max_step))) if span > 0 else 0
        h = span / n if n else 0.0
        for _ in range(n):
            k1 = f(rho)
            k2 = f(rho + 0.5 * h * k1)
            k3 = f(rho + 0.5 * h * k2)
            k4 = f(rho + h * k3)
            rho = rho + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t_next
        s = FockState(state.dims, 0.5 * (rho + rho.conj().T))
        guard(s)
        out.append(s)
    return out


def kerr_master_evolve(alpha0, g, kappa, D, t_grid, max_step=None):
    """Exact Kerr + loss moments on ``t_grid`` from the coherent state ``alpha0``."""
    a = destroy(D)
    ad = a.conj().T
    H = 0.5 * g * ad @ ad @ a @ a
    Ls = [np.sqrt(2 * kappa) * a] if kappa > 0 else []
    if max_step is None:
        spread = 0.5 * g * D * D + 2 * kappa * D
        max_step = 0.5 / spread if spread > 0 else np.inf
    state = product_state(coherent_ket(alpha0, D))
    guard(state)
    states = master_evolve(state, H, Ls, t_grid, max_step)
    mean = np.array([s.expect(a) for s in states])
    a2 = np.array([s.expect(a @ a) for s in states])
    n = np.array([s.expect(ad @ a) for s in states])
    traj = KerrTrajectory(np.asarray(t_grid, float), mean, a2 - mean**2, n - np.abs(mean) ** 2)
    return traj


@dataclass
class TwoModeMoments:
    """Gaussian moments of modes (a, b) in the same layout as the envelope states."""

    mu_a: complex
    mu_b: complex
    Cp_aa: complex
    Cm_aa: complex
    Cp_bb: complex
    Cm_bb: complex
    Cp_ab: complex
    Cm_ab: complex


def two_mode_moments(state: FockState) -> TwoModeMoments:
    a, b = state.ops()
    E = state.expect
    ma, mb = E(a), E(b)
    return TwoModeMoments(
        mu_a=ma,
        mu_b=mb,
        Cp_aa=E(a @ a) - ma * ma,
        Cm_aa=E(a.conj().T @ a) - abs(ma) ** 2,
        Cp_bb=E(b @ b) - mb * mb,
        Cm_bb=E(b.conj().T @ b) - abs(mb) ** 2,
        Cp_ab=E(a @ b) - ma * mb,
        Cm_ab=E(a.conj().T @ b) - np.conj(ma) * mb,
    )


def chi2_hamiltonian(eps, D_a, D_b):
    """(eps/2)(i b a^dag^2 - i b^dag a^2) with a the FH mode and b the SH mode."""
    a = np.kron(destroy(D_a), np.eye(D_b))
    b = np.kron(np.eye(D_a), destroy(D_b))
    ad, bd = a.conj().T, b.conj().T
    return 0.5 * eps * (1j * b @ ad @ ad - 1j * bd @ a @ a)


def chi2_single_bin_evolve(alpha_fh, beta_sh, eps, D_a, D_b, t_grid, max_step=None):
    """Exact single-bin three-wave mixing from coherent (FH, SH) inputs."""
    H = chi2_hamiltonian(eps, D_a, D_b)
    if max_step is None:
        max_step = 1.0 / max(np.linalg.norm(H, 2), 1e-300)
    state = product_state(coherent_ket(alpha_fh, D_a), coherent_ket(beta_sh, D_b))
    guard(state)
    states = master_evolve(state, H, [], t_grid, max_step)
    return [two_mode_moments(s) for s in states], states


def quadratic_unitary(dims, passive, squeeze, displacement):
    """exp(-i H) for H = c^dag h c + (1/2)(c^dag s c^dag + h.c.) + (d . c^dag + h.c.).

    ``passive`` must be Hermitian and ``squeeze`` symmetric (both n x n, n = len(dims)).
    """
    st = FockState(tuple(dims), np.eye(int(np.prod(dims)), dtype=complex))
    c = st.ops()
    cd = [x.conj().T for x in c]
    n = len(c)
    H = np.zeros_like(st.rho)
    for i in range(n):
        H += displacement[i] * cd[i] + np.conj(displacement[i]) * c[i]
        for j in range(n):
            H += passive[i, j] * cd[i] @ c[j]
            S = 0.5 * squeeze[i, j] * cd[i] @ cd[j]
            H += S + S.conj().T
    return expm(-1j * H)


def gaussian_fock_state(n_th, passive, squeeze, displacement, D):
    """Thermal product state transformed by a quadratic unitary, in a D^n truncation."""
    rho0 = product_state(*[thermal_rho(x, D) for x in n_th])
    U = quadratic_unitary(rho0.dims, passive, squeeze, displacement)
    return FockState(rho0.dims, U @ rho0.rho @ U.conj().T)


def fock_moment(state: FockState, labels) -> complex:
    """<x u v y ...> for labels ``(mode, dagger)`` taken in operator order."""
    ops = state.ops()
    prod = np.eye(state.rho.shape[0], dtype=complex)
    for mode, dag in labels:
        op = ops[mode]
        prod = prod @ (op.conj().T if dag else op)
    return state.expect(prod)

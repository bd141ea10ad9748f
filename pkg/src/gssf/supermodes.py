"""Symplectic analysis of quadrature covariance matrices.

Conventions: quadratures are ordered ``(q_1..q_N, p_1..p_N)`` with a = (q + i p)/sqrt 2,
so the vacuum covariance is I/2 and the symplectic form is ``[[0, I], [-I, 0]]``.
Squeezing levels are quoted in dB relative to the vacuum variance 1/2:
``squeeze_db = -10 log10(2 var_min)`` and ``antisqueeze_db = 10 log10(2 var_max)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .gstate import (
    GaussianEnvelopeState,
    TwoEnvelopeState,
    physicality_margin,
    symplectic_form,
    to_quadrature_covariance,
)

log = logging.getLogger(__name__)

SYMPLECTIC_TOL = 1e-8
UNSQUEEZED_TOL = 1e-8
# pure states sit on the uncertainty bound, so integration error alone can dip below it
PHYSICAL_TOL = 1e-6


class SymplecticError(ValueError):
    pass


def _check_sigma(Sigma):
    Sigma = np.asarray(Sigma, dtype=float)
    n2 = Sigma.shape[0]
    if Sigma.ndim != 2 or Sigma.shape != (n2, n2) or n2 % 2:
        raise SymplecticError("Sigma must be a square matrix of even size")
    scale = max(1.0, np.max(np.abs(Sigma)))
    if np.max(np.abs(Sigma - Sigma.T)) > 1e-10 * scale:
        raise SymplecticError("Sigma is not symmetric")
    return 0.5 * (Sigma + Sigma.T)


def williamson(Sigma):
    """``Sigma = S diag(d, d) S^T`` with S symplectic and ``d`` descending.

    Returns ``(S, d)``. Uses ``A = Sigma^1/2 Omega Sigma^1/2``, whose real Schur form
    is a set of 2x2 blocks ``[[0, d_k], [-d_k, 0]]``; then ``S = Sigma^1/2 O D^-1/2``.
    """
    Sigma = _check_sigma(Sigma)
    N = Sigma.shape[0] // 2
    w, V = np.linalg.eigh(Sigma)
    if w[0] <= 0:
        raise SymplecticError(f"Sigma is not positive definite (min eigenvalue {w[0]:.3e})")
    R = (V * np.sqrt(w)) @ V.T
    Om = symplectic_form(N)
    A = R @ Om @ R
    A = 0.5 * (A - A.T)
    T, Z = linalg.schur(A, output="real")

    q_cols, p_cols, d = [], [], []
    i = 0
    while i < 2 * N:
        if i + 1 >= 2 * N or abs(T[i + 1, i]) == 0.0 and abs(T[i, i + 1]) == 0.0:
            raise SymplecticError("degenerate Schur form (zero symplectic eigenvalue)")
        b, c = T[i, i + 1], T[i + 1, i]
        dk = np.sqrt(abs(b * c))
        if b > 0:
            q_cols.append(Z[:, i])
            p_cols.append(Z[:, i + 1])
        else:
            q_cols.append(Z[:, i + 1])
            p_cols.append(Z[:, i])
        d.append(dk)
        i += 2
    d = np.array(d)
    # eigenvalue round-off in Sigma^1/2 grows with its condition number
    tol = max(PHYSICAL_TOL, 64 * np.finfo(float).eps * w[-1] / w[0])
    if d.min() < 0.5 - tol:
        raise SymplecticError(f"unphysical state: symplectic eigenvalue {d.min():.8f} < 1/2")

    O = np.column_stack(q_cols + p_cols)
    scale = np.concatenate([d, d]) ** -0.5
    S = (R @ O) * scale

    # sort by descending d; ties broken by the position of each column's peak weight
    weight = S[:, :N] ** 2 + S[:, N:] ** 2
    peak = np.argmax(weight[:N] + weight[N:], axis=0)
    order = np.lexsort((peak, -np.round(d, 10)))
    S = S[:, np.concatenate([order, order + N])]
    return S, d[order]


def is_symplectic(S, tol=SYMPLECTIC_TOL) -> bool:
    Om = symplectic_form(S.shape[0] // 2)
    scale = max(1.0, np.linalg.norm(S, 2) ** 2)
    return bool(np.max(np.abs(S @ Om @ S.T - Om)) <= tol * scale)


def _complex_basis(W, N):
    """Orthonormal ``v_k`` spanning the Omega-invariant subspace W as pairs (v, Omega^T v).

    Omega^T restricted to W is antisymmetric with eigenvalues +-i; each 2x2 block of its
    real Schur form spans one pair, so the first column of every block is a valid v.
    """
    if W.shape[1] == 0:
        return np.zeros((2 * N, 0))
    K = W.T @ (symplectic_form(N).T @ W)
    _, Z = linalg.schur(0.5 * (K - K.T), output="real")
    V = W @ Z[:, 0::2]
    return V / np.linalg.norm(V, axis=0)


def bloch_messiah(S):
    """``S = O_out diag(e^-r, e^r) O_in`` with orthogonal symplectic ``O_out``, ``O_in``.

    Returns ``(O_out, r, O_in)``; ``r >= 0`` sorted descending. The squeezed quadrature
    of output mode k is column k of O_out, its partner is column N + k.
    """
    S = np.asarray(S, dtype=float)
    N = S.shape[0] // 2
    if not is_symplectic(S):
        raise SymplecticError("input is not symplectic")
    U, s, _ = np.linalg.svd(S)
    logs = np.log(s)
    sq = logs < -UNSQUEEZED_TOL
    flat = np.abs(logs) <= UNSQUEEZED_TOL
    n_sq = int(sq.sum())
    if 2 * n_sq + int(flat.sum()) != 2 * N:
        raise SymplecticError("singular values are not paired as (s, 1/s)")
    V = U[:, sq]
    r = -logs[sq]
    order = np.argsort(-r, kind="stable")
    V, r = V[:, order], r[order]
    if flat.any():
        V = np.column_stack([V, _complex_basis(U[:, flat], N)])
        r = np.concatenate([r, np.zeros(N - n_sq)])
    Om = symplectic_form(N)
    O_out = np.column_stack([V, Om.T @ V])
    lam = np.concatenate([np.exp(r), np.exp(-r)])  # inverse of Lambda
    O_in = (O_out.T @ S) * lam[:, None]
    return O_out, r, O_in


@dataclass
class SupermodeDecomposition:
    """Squeezing supermodes of a covariance matrix, sorted by antisqueezing (descending).

    ``U`` maps the analysis modes to supermodes, ``C_i = sum_j U_ij c_j``; the waveform
    of supermode i is ``U[i].conj()``.
    """

    U: np.ndarray
    r: np.ndarray
    n_th: np.ndarray
    squeeze_db: np.ndarray
    antisqueeze_db: np.ndarray
    S: np.ndarray
    d: np.ndarray
    O_out: np.ndarray
    O_in: np.ndarray

    @property
    def N(self) -> int:
        return len(self.r)

    def waveforms(self) -> np.ndarray:
        """Row i is the mode function of supermode i on the analysis basis."""
        return self.U.conj()

    def table(self):
        """Rows of (index, squeeze_db, antisqueeze_db, n_th)."""
        return np.column_stack([np.arange(self.N), self.squeeze_db, self.antisqueeze_db,
                                self.n_th])


def decompose_sigma(Sigma) -> SupermodeDecomposition:
    Sigma = _check_sigma(Sigma)
    margin = physicality_margin(Sigma)
    if margin < -PHYSICAL_TOL * max(1.0, np.max(np.abs(Sigma))):
        raise SymplecticError(f"covariance violates the uncertainty principle ({margin:.3e})")
    N = Sigma.shape[0] // 2
    S, d = williamson(Sigma)
    O_out, r, O_in = bloch_messiah(S)
    St = O_out.T @ Sigma @ O_out
    var = np.diagonal(St)
    sq_db = -10 * np.log10(2 * var[:N])
    asq_db = 10 * np.log10(2 * var[N:])
    order = np.argsort(-asq_db, kind="stable")
    cols = np.concatenate([order, order + N])
    O_out = O_out[:, cols]
    O_in = O_in[cols]
    X, Y = O_out[:N, :N], O_out[N:, :N]
    U = (X + 1j * Y).conj().T
    return SupermodeDecomposition(
        U=U,
        r=r[order],
        n_th=np.maximum(d - 0.5, 0.0),
        squeeze_db=sq_db[order],
        antisqueeze_db=asq_db[order],
        S=S,
        d=d,
        O_out=O_out,
        O_in=O_in,
    )


def decompose(state_or_sigma, envelope: str | None = None,
              domain: str = "z") -> SupermodeDecomposition:
    """Supermodes of a state (in ``domain`` modes) or of a covariance matrix."""
    if isinstance(state_or_sigma, TwoEnvelopeState):
        st = state_or_sigma.to(domain)
        state_or_sigma = st if envelope is None else st.envelope(envelope)
    if isinstance(state_or_sigma, (GaussianEnvelopeState, TwoEnvelopeState)):
        Sigma = to_quadrature_covariance(state_or_sigma.to(domain))
    else:
        Sigma = state_or_sigma
    return decompose_sigma(Sigma)


def random_symplectic(N, rng, r_max=1.0, r=None):
    """``O1 diag(e^-r, e^r) O2`` from random orthogonal-symplectic factors."""
    def orth():
        Q = linalg.qr(rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N)))[0]
        X, Y = Q.real, Q.imag
        return np.block([[X, -Y], [Y, X]])

    if r is None:
        r = rng.uniform(0, r_max, N)
    lam = np.concatenate([np.exp(-r), np.exp(r)])
    return orth() @ np.diag(lam) @ orth(), np.asarray(r)

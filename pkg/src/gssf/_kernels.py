"""Fused numba loops for the O(M^2) nonlinear right-hand sides.

Each kernel mirrors a NumPy reference (``chi3.nl_arrays``, ``chi2.nl_arrays``,
``chi2.opg_arrays``) and is checked against it in the tests. Loops run over 32x32
tiles so the transposed reads stay in cache.
"""

from __future__ import annotations

import numpy as np
from numba import njit

TILE = 32


@njit(cache=True)
def chi3_rhs(mu, Cp, Cm, g, linearized):
    M = mu.shape[0]
    s = np.empty(M, np.complex128)
    n = np.empty(M, np.float64)
    dmu = np.empty(M, np.complex128)
    for i in range(M):
        d2 = mu[i].real ** 2 + mu[i].imag ** 2
        if linearized:
            s[i] = mu[i] * mu[i]
            n[i] = d2
            dmu[i] = -1j * g * d2 * mu[i]
        else:
            s[i] = mu[i] * mu[i] + Cp[i, i]
            n[i] = d2 + Cm[i, i].real
            dmu[i] = -1j * g * (d2 * mu[i] + 2 * mu[i] * Cm[i, i] + np.conj(mu[i]) * Cp[i, i])
    dCp = np.empty((M, M), np.complex128)
    dCm = np.empty((M, M), np.complex128)
    f = -1j * g
    for i0 in range(0, M, TILE):
        for j0 in range(0, M, TILE):
            for i in range(i0, min(i0 + TILE, M)):
                si, ni, sic = s[i], n[i], np.conj(s[i])
                for j in range(j0, min(j0 + TILE, M)):
                    p = Cp[i, j]
                    dCp[i, j] = f * (si * Cm[i, j] + s[j] * Cm[j, i] + 2 * (ni + n[j]) * p)
                    dCm[i, j] = f * (s[j] * np.conj(p) - sic * p - 2 * (ni - n[j]) * Cm[i, j])
    for i in range(M):
        dCp[i, i] += f * s[i]
    return dmu, dCp, dCm


@njit(cache=True)
def chi2_rhs(a, b, Paa, Maa, Pbb, Mbb, Pab, Mab, eps):
    M = a.shape[0]
    da = np.empty(M, np.complex128)
    db = np.empty(M, np.complex128)
    for i in range(M):
        da[i] = eps * (b[i] * np.conj(a[i]) + Mab[i, i])
        db[i] = -0.5 * eps * (a[i] * a[i] + Paa[i, i])
    dPaa = np.empty((M, M), np.complex128)
    dMaa = np.empty((M, M), np.complex128)
    dPbb = np.empty((M, M), np.complex128)
    dMbb = np.empty((M, M), np.complex128)
    dPab = np.empty((M, M), np.complex128)
    dMab = np.empty((M, M), np.complex128)
    for i0 in range(0, M, TILE):
        for j0 in range(0, M, TILE):
            for i in range(i0, min(i0 + TILE, M)):
                ai, bi = a[i], b[i]
                aic, bic = np.conj(ai), np.conj(bi)
                for j in range(j0, min(j0 + TILE, M)):
                    aj, bj = a[j], b[j]
                    ajc = np.conj(aj)
                    pab, pab_t = Pab[i, j], Pab[j, i]
                    mab, mab_tc = Mab[i, j], np.conj(Mab[j, i])
                    paa, maa = Paa[i, j], Maa[i, j]
                    dPaa[i, j] = eps * (aic * pab_t + bi * maa + ajc * pab + bj * Maa[j, i])
                    dMaa[i, j] = eps * (bic * paa + ai * mab_tc + bj * np.conj(paa) + ajc * mab)
                    dPbb[i, j] = -eps * (ai * pab + aj * pab_t)
                    dMbb[i, j] = -eps * (aic * mab + aj * mab_tc)
                    dPab[i, j] = eps * (bi * mab + aic * Pbb[i, j] - aj * paa)
                    dMab[i, j] = eps * (bic * pab + ai * Mbb[i, j] - aj * maa)
    for i in range(M):
        dPaa[i, i] += eps * b[i]
    return da, db, dPaa, dMaa, dPbb, dMbb, dPab, dMab


@njit(cache=True)
def opg_rhs(b, Paa, Maa, eps):
    M = b.shape[0]
    db = np.empty(M, np.complex128)
    for i in range(M):
        db[i] = -0.5 * eps * Paa[i, i]
    dPaa = np.empty((M, M), np.complex128)
    dMaa = np.empty((M, M), np.complex128)
    for i0 in range(0, M, TILE):
        for j0 in range(0, M, TILE):
            for i in range(i0, min(i0 + TILE, M)):
                bi, bic = b[i], np.conj(b[i])
                for j in range(j0, min(j0 + TILE, M)):
                    bj = b[j]
                    paa = Paa[i, j]
                    dPaa[i, j] = eps * (bi * Maa[i, j] + bj * Maa[j, i])
                    dMaa[i, j] = eps * (bic * paa + bj * np.conj(paa))
    for i in range(M):
        dPaa[i, i] += eps * b[i]
    return db, dPaa, dMaa

"""Single-mode Kerr oscillator, H = (g/2) a^dag^2 a^2, with optional field decay kappa.

Two Gaussian closures are provided: the linearized treatment (the mean evolves
classically and drives linear fluctuations) and the nonlinear Gaussian model (means
and covariances feed back on each other). Moments are ``(mean, varA, covNA)`` with
``varA = <da da>`` and ``covNA = <da^dag da>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MODELS = ("linearized", "nlg")


@dataclass(frozen=True)
class KerrParams:
    g: float = 1.0
    kappa: float = 0.0
    alpha0: complex = np.sqrt(20.0)

    def __post_init__(self):
        if self.g < 0:
            raise ValueError("g must be >= 0")
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")


@dataclass
class KerrTrajectory:
    t: np.ndarray
    mean: np.ndarray
    varA: np.ndarray
    covNA: np.ndarray

    @property
    def photon_number(self) -> np.ndarray:
        return np.abs(self.mean) ** 2 + self.covNA.real

    def quadrature_variances(self):
        """(major, minor) eigenvalues of the symmetrized 2x2 quadrature covariance.

        Vacuum gives 1/2 for both.
        """
        n = self.covNA.real
        r = np.abs(self.varA)
        return 0.5 + n + r, 0.5 + n - r


def linearized_moments(alpha0, tau):
    """Closed-form lossless linearized solution at ``tau = |alpha0|^2 g t``."""
    tau = np.asarray(tau, dtype=float)
    phase = alpha0 / abs(alpha0) if alpha0 != 0 else 1.0
    mean = alpha0 * np.exp(-1j * tau)
    varA = -(phase**2) * np.exp(-2j * tau) * (tau**2 + 1j * tau)
    covNA = tau**2 + 0j
    return mean, varA, covNA


def linearized_rhs(mean, varA, covNA, params: KerrParams):
    g, kappa = params.g, params.kappa
    a2 = mean * mean
    n = abs(mean) ** 2
    dmean = -1j * g * n * mean - kappa * mean
    dvar = -1j * g * (a2 * (2 * covNA + 1) + 4 * n * varA) - 2 * kappa * varA
    dcov = -1j * g * (a2 * np.conj(varA) - np.conj(a2) * varA) - 2 * kappa * covNA
    return dmean, dvar, dcov


def nlg_rhs(mean, varA, covNA, params: KerrParams):
    g, kappa = params.g, params.kappa
    a2 = mean * mean + varA
    n = abs(mean) ** 2 + covNA
    dmean = -1j * g * (np.conj(mean) * mean * mean + 2 * mean * covNA + np.conj(mean) * varA)
    dmean -= kappa * mean
    dvar = -1j * g * (a2 * (2 * covNA + 1) + 4 * n * varA) - 2 * kappa * varA
    dcov = -1j * g * (a2 * np.conj(varA) - np.conj(a2) * varA) - 2 * kappa * covNA
    return dmean, dvar, dcov


def evolve(model: str, params: KerrParams, t_final: float, steps: int, samples: int | None = None):
    """Fixed-step RK4 from the coherent state ``alpha0``.

    Returns a :class:`KerrTrajectory` sampled at every step, or at ``samples + 1``
    evenly spaced points when ``samples`` divides ``steps``.
    """
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rhs = linearized_rhs if model == "linearized" else nlg_rhs
    every = 1 if samples is None else steps // samples
    if every * (samples or steps) != steps:
        raise ValueError("samples must divide steps")
    h = t_final / steps
    y = np.array([params.alpha0, 0, 0], dtype=complex)

    def f(y):
        return np.array(rhs(y[0], y[1], y[2], params))

    out = [y]
    for i in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise FloatingPointError(f"non-finite Kerr moments at t={(i + 1) * h:g} ({model})")
        if (i + 1) % every == 0:
            out.append(y)
    out = np.array(out)
    t = np.linspace(0, t_final, len(out))
    return KerrTrajectory(t, out[:, 0], out[:, 1], out[:, 2])

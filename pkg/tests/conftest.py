import logging

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gssf import gstate
from gssf.grid import make_grid

settings.register_profile(
    "gssf", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("gssf")

logging.getLogger("gssf").setLevel(logging.WARNING)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_physical_state(grid, rng, n_th=0.2, squeeze=0.3, mean=1.0):
    """Random mixed Gaussian envelope state built from a thermal state and a symplectic map."""
    from gssf.supermodes import random_symplectic

    N = grid.M
    S, _ = random_symplectic(N, rng, r_max=squeeze)
    d = 0.5 + rng.uniform(0, n_th, N)
    Sigma = S @ np.diag(np.concatenate([d, d])) @ S.T
    Cp, Cm = gstate.moments_from_quadrature(Sigma)
    mu = mean * (rng.normal(size=N) + 1j * rng.normal(size=N))
    return gstate.GaussianEnvelopeState(grid, mu, Cp, Cm, "z")


def random_two_envelope_state(grid, rng, **kw):
    big = random_physical_state(make_grid(2 * grid.M, grid.window), rng, **kw)
    M = grid.M
    Cp, Cm = big.Cp, big.Cm
    return gstate.TwoEnvelopeState(
        grid, big.mu[:M], big.mu[M:],
        Cp[:M, :M], Cm[:M, :M], Cp[M:, M:], Cm[M:, M:], Cp[:M, M:], Cm[:M, M:], domain="z",
    )


@pytest.fixture
def small_grid():
    return make_grid(8, 4.0)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

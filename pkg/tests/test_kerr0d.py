import numpy as np
import pytest
from hypothesis import given, strategies as st

from gssf import fockoracle as fo
from gssf import kerr0d
from gssf.kerr0d import KerrParams


def test_linearized_closed_form_values():
    mean, var, cov = kerr0d.linearized_moments(np.sqrt(20.0), 1.0)
    assert np.isclose(cov, 1.0)
    assert np.isclose(abs(var), np.sqrt(2.0))
    assert np.isclose(mean, np.sqrt(20.0) * np.exp(-1j))


@pytest.mark.parametrize("phase", [0.0, 0.7, -2.0])
def test_linearized_matches_closed_form(phase):
    a0 = 3.0 * np.exp(1j * phase)
    g = 0.5
    t_final = 2.0 / (abs(a0) ** 2 * g)
    tr = kerr0d.evolve("linearized", KerrParams(g=g, alpha0=a0), t_final, 2000, 100)
    tau = abs(a0) ** 2 * g * tr.t
    m, v, c = kerr0d.linearized_moments(a0, tau)
    assert np.allclose(tr.mean, m, rtol=0, atol=1e-9 * abs(a0))
    assert np.allclose(tr.varA, v, rtol=0, atol=1e-9 * np.max(np.abs(v)))
    assert np.allclose(tr.covNA, c, rtol=0, atol=1e-9 * np.max(np.abs(c)))


@given(st.floats(0.5, 5.0), st.floats(0.1, 2.0))
def test_nlg_conserves_photon_number(amp, g):
    tr = kerr0d.evolve("nlg", KerrParams(g=g, alpha0=amp), 1.0 / (amp**2 * g), 400)
    n = tr.photon_number
    assert np.max(np.abs(n / n[0] - 1)) < 1e-11


@pytest.mark.parametrize("model", kerr0d.MODELS)
def test_nlg_and_linearized_loss_decay(model):
    # Kerr commutes with the photon number, so loss alone sets n(t) in the NLG model;
    # the linearized mean decays at the same rate
    kappa = 0.8
    tr = kerr0d.evolve(model, KerrParams(g=1.0, kappa=kappa, alpha0=2.0), 0.5, 1000, 10)
    target = 4.0 * np.exp(-2 * kappa * tr.t)
    if model == "nlg":
        assert np.allclose(tr.photon_number, target, rtol=1e-10)
    else:
        assert np.allclose(np.abs(tr.mean) ** 2, target, rtol=1e-10)


def test_vacuum_quadrature_variances():
    tr = kerr0d.evolve("nlg", KerrParams(alpha0=0.0), 1.0, 10)
    major, minor = tr.quadrature_variances()
    assert np.allclose(major, 0.5) and np.allclose(minor, 0.5)


def test_nlg_tracks_exact_mean_at_short_times():
    # lossless Kerr: <a(t)> = alpha exp(|alpha|^2 (exp(-i g t) - 1))
    a0, g = 2.0, 1.0
    t = np.linspace(0, 0.05, 11)
    exact = a0 * np.exp(a0**2 * (np.exp(-1j * g * t) - 1))
    ref = fo.kerr_master_evolve(a0, g, 0.0, 30, t)
    assert np.allclose(ref.mean, exact, atol=1e-8)
    tr = kerr0d.evolve("nlg", KerrParams(g=g, alpha0=a0), 0.05, 1000, 10)
    assert np.max(np.abs(tr.mean - exact)) < 1e-3


def test_input_validation():
    with pytest.raises(ValueError):
        KerrParams(g=-1.0)
    with pytest.raises(ValueError):
        KerrParams(kappa=-0.1)
    with pytest.raises(ValueError):
        kerr0d.evolve("exact", KerrParams(), 1.0, 10)
    with pytest.raises(ValueError):
        kerr0d.evolve("nlg", KerrParams(), 1.0, 10, samples=3)

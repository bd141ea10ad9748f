import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import constants

from gssf import gstate
from gssf.grid import make_grid
from gssf.gstate import PulseSpec

from conftest import random_physical_state, random_two_envelope_state


def test_vacuum_is_zero_and_physical():
    g = make_grid(8, 1.0)
    v = gstate.vacuum(g)
    assert not np.any(v.mu) and not np.any(v.Cp) and not np.any(v.Cm)
    Sigma = gstate.to_quadrature_covariance(v)
    assert np.allclose(Sigma, 0.5 * np.eye(16))
    assert abs(gstate.physicality_margin(Sigma)) < 1e-12
    assert gstate.photon_number(v) == 0


@given(st.integers(0, 2**31))
def test_quadrature_round_trip(seed):
    r = np.random.default_rng(seed)
    s = random_physical_state(make_grid(6, 1.0), r)
    Sigma = gstate.to_quadrature_covariance(s)
    Cp, Cm = gstate.moments_from_quadrature(Sigma)
    assert np.allclose(Cp, s.Cp, atol=1e-10)
    assert np.allclose(Cm, s.Cm, atol=1e-10)
    assert gstate.is_physical(Sigma)


def test_domain_round_trip(rng):
    s = random_physical_state(make_grid(8, 2.0), rng)
    back = s.to_k().to_z()
    for n in ("mu", "Cp", "Cm"):
        assert np.allclose(getattr(back, n), getattr(s, n))
    assert s.to_z() is s
    # photon number is basis independent
    assert np.isclose(gstate.photon_number(s), gstate.photon_number(s.to_k()))


def test_two_envelope_domain_and_stacking(rng):
    g = make_grid(6, 1.0)
    s = random_two_envelope_state(g, rng)
    k = s.to_k()
    assert np.allclose(k.envelope("a").mu, s.envelope("a").to_k().mu)
    back = k.to_z()
    for n in s.MEANS + s.BLOCKS:
        assert np.allclose(getattr(back, n), getattr(s, n))
    mu, Cp, Cm = s.stacked()
    assert mu.shape == (12,) and np.allclose(Cp, Cp.T) and np.allclose(Cm, Cm.conj().T)
    assert gstate.is_physical(gstate.to_quadrature_covariance(s))


def test_shape_and_domain_validation():
    g = make_grid(4, 1.0)
    z = np.zeros((4, 4))
    with pytest.raises(ValueError):
        gstate.GaussianEnvelopeState(g, np.zeros(3), z, z)
    with pytest.raises(ValueError):
        gstate.GaussianEnvelopeState(g, np.zeros(4), z, z, domain="x")
    with pytest.raises(ValueError):
        gstate.two_envelope_vacuum(g).envelope("c")


def test_check_blocks():
    g = make_grid(4, 1.0)
    s = gstate.vacuum(g)
    s.Cm[0, 1] = 1.0
    with pytest.raises(ValueError, match="Hermitian"):
        s.check()
    s = gstate.vacuum(g)
    s.Cm[0, 0] = -1.0
    with pytest.raises(ValueError, match="negative"):
        s.check()


def test_coherent_pulse_energy():
    g = make_grid(256, 2e-12)
    spec = PulseSpec(energy=3e-12, fwhm=100e-15, carrier_wavelength=1045e-9)
    s = gstate.coherent_pulse(g, spec)
    E = gstate.photon_number(s) * constants.h * constants.c / 1045e-9
    assert np.isclose(E, 3e-12, rtol=1e-12)
    # intensity FWHM of the sampled pulse
    I = g.physical_order(np.abs(s.mu) ** 2)
    t = g.physical_order(g.z)
    above = t[I >= I.max() / 2]
    assert abs((above[-1] - above[0]) - 100e-15) < 2 * g.dz


def test_coherent_pulse_must_fit():
    with pytest.raises(ValueError, match="window"):
        gstate.coherent_pulse(make_grid(64, 200e-15), PulseSpec(1e-12, 100e-15, 1e-6))
    with pytest.raises(ValueError):
        PulseSpec(-1.0, 1.0, 1.0)


def test_manley_rowe():
    g = make_grid(4, 1.0)
    s = gstate.two_envelope_vacuum(g)
    s.mu_a[0] = 2.0
    s.mu_b[1] = 1.0
    s.Cm_aa[2, 2] = 0.5
    assert np.isclose(gstate.manley_rowe(s), 4.0 + 0.5 + 2 * 1.0)


def test_fluorescence_spectrum_of_thermal_bin():
    g = make_grid(4, 1.0)
    s = gstate.vacuum(g)
    s.Cm[0, 0] = 1.0
    # one excited bin spreads evenly over all wave modes
    assert np.allclose(gstate.fluorescence_spectrum(s), 0.25)


def test_unphysical_detected():
    Sigma = np.diag([0.1, 0.1, 0.5, 0.5])
    assert not gstate.is_physical(Sigma)
    # smallest eigenvalue of [[0.1, i/2], [-i/2, 0.5]]
    assert np.isclose(gstate.physicality_margin(Sigma), 0.3 - np.sqrt(0.29))

import warnings

import numpy as np
import pytest

from gssf import fockoracle as fo
from gssf import heterodyne as het
from gssf.grid import make_grid
from gssf.gstate import GaussianEnvelopeState, two_envelope_vacuum

from conftest import random_two_envelope_state


def random_fock_gaussian(rng, D0=14, D_max=30):
    """Mild random two-mode Gaussian state in a Fock basis large enough to hold it."""
    n_th = rng.uniform(0, 0.1, 2)
    h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    h = 0.3 * (h + h.conj().T)
    s = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    s = 0.06 * (s + s.T)
    d = 0.3 * (rng.normal(size=2) + 1j * rng.normal(size=2))
    D = D0
    while True:
        st = fo.gaussian_fock_state(n_th, h, s, d, D)
        if st.top_population() < 1e-12 or D >= D_max:
            return st
        D += 4


def gaussian_moments(st):
    E = lambda L: fo.fock_moment(st, L)  # noqa: E731
    mu = np.array([E([(0, 0)]), E([(1, 0)])])
    Cp = np.array([[E([(i, 0), (j, 0)]) - mu[i] * mu[j] for j in range(2)] for i in range(2)])
    Cm = np.array([[E([(i, 1), (j, 0)]) - np.conj(mu[i]) * mu[j] for j in range(2)]
                   for i in range(2)])
    return mu, Cp, Cm


def reduced_fock(st, L):
    return fo.fock_moment(st, L) - fo.fock_moment(st, [L[0], L[3]]) * fo.fock_moment(st, [L[1], L[2]])


def test_fourth_moment_matches_fock(rng):
    for _ in range(4):
        st = random_fock_gaussian(rng)
        mu, Cp, Cm = gaussian_moments(st)
        for _ in range(4):
            L = [(int(rng.integers(2)), int(rng.integers(2))) for _ in range(4)]
            ref = reduced_fock(st, L)
            assert abs(het.fourth_moment(mu, Cp, Cm, L) - ref) <= 1e-4 * max(1.0, abs(ref))


def test_fourth_moment_reduced_on_two_envelope_state(rng):
    st = random_fock_gaussian(rng)
    mu, Cp, Cm = gaussian_moments(st)
    g = make_grid(2, 1.0)
    s = two_envelope_vacuum(g)
    # put Fock mode 0 on a_0 and mode 1 on b_0
    s.mu_a[0], s.mu_b[0] = mu
    s.Cp_aa[0, 0], s.Cp_bb[0, 0], s.Cp_ab[0, 0] = Cp[0, 0], Cp[1, 1], Cp[0, 1]
    s.Cm_aa[0, 0], s.Cm_bb[0, 0], s.Cm_ab[0, 0] = Cm[0, 0], Cm[1, 1], Cm[0, 1]
    L = [(0, 1), (1, 0), (1, 1), (0, 0)]
    labels = [("a" if m == 0 else "b", 0, dag) for m, dag in L]
    assert np.isclose(het.fourth_moment_reduced(s, labels), reduced_fock(st, L), atol=1e-8)


@pytest.mark.parametrize("labels", [
    [("a", 0, 1), ("a", 1, 1), ("b", 1, 0), ("b", 0, 0)],
    [("a", -1, 1), ("a", 1, 0), ("b", 0, 1), ("b", 1, 0)],
    [("a", 0, 1), ("a", 0, 1), ("a", 0, 0), ("a", 0, 0)],
])
def test_coherent_state_gives_exact_zero(labels, rng):
    s = two_envelope_vacuum(make_grid(4, 1.0))
    s.mu_a = rng.normal(size=4) + 1j * rng.normal(size=4)
    s.mu_b = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert het.fourth_moment_reduced(s, labels) == 0


def test_coherent_antinormal_order_keeps_commutators():
    # <a a a^dag a^dag> - <a a^dag>^2 = 2|alpha|^2 + 1 for a coherent state
    s = two_envelope_vacuum(make_grid(2, 1.0))
    s.mu_a[0] = 1.5 - 0.5j
    got = het.fourth_moment_reduced(s, [("a", 0, 0), ("a", 0, 0), ("a", 0, 1), ("a", 0, 1)])
    assert np.isclose(got, 2 * abs(s.mu_a[0]) ** 2 + 1)


def test_label_validation():
    g = make_grid(4, 1.0)
    s = two_envelope_vacuum(g)
    with pytest.raises(IndexError):
        het.fourth_moment_reduced(s, [("c", 0, 0)] * 4)
    with pytest.raises(IndexError):
        het.fourth_moment_reduced(s, [("a", 9, 0)] * 4)
    one = GaussianEnvelopeState(g, np.zeros(4), np.zeros((4, 4)), np.zeros((4, 4)))
    with pytest.raises(IndexError):
        het.fourth_moment_reduced(one, [("b", 0, 0)] * 4)
    with pytest.raises(ValueError):
        het.fourth_moment(np.zeros(2), np.zeros((2, 2)), np.zeros((2, 2)), [(0, 0)] * 3)


def test_comb_spec():
    c = het.CombSpec.for_grid(2e-12, 143.4e12, np.pi / 3)
    assert np.isclose(c.f_rep, 5e11)
    assert np.isclose(c.phi_ceo, np.pi / 3)
    assert c.m0 == round(143.4e12 / 5e11)
    assert c.q(c.m0 + 3) == 3
    for bad in [(0.0, 0.1, 0), (1.0, 0.0, 0), (1.0, 1.0, 0)]:
        with pytest.raises(ValueError):
            het.CombSpec(*bad)


def test_sinc_convention():
    assert het.sinc(0.0) == 1.0
    assert np.isclose(het.sinc(np.pi / 2), 2 / np.pi)


def _comb_state(rng, M=8):
    g = make_grid(M, 1.0)
    s = random_two_envelope_state(g, rng, mean=0.5).to_k()
    return s, het.CombSpec(1.0, 1 / 6, 2)


def test_report_symmetry_and_structure(rng):
    s, comb = _comb_state(rng)
    rep = het.ceo_noise(s, comb)
    assert np.allclose(rep.N1, rep.N1.T) and np.allclose(rep.N2, rep.N2.T)
    assert len(rep.m) == len(rep.S) == rep.N1.shape[0]
    assert np.all(np.abs(comb.q(rep.m)) <= 4)
    assert np.all(rep.N_shot >= 0)
    m, S, total = het.ceo_signal(s, comb)
    assert np.array_equal(m, rep.m) and np.allclose(S, rep.S) and np.isclose(total, rep.total_signal)
    assert 0 <= rep.offdiagonal_weight() <= 1


def test_report_against_fourth_moment(rng):
    s, comb = _comb_state(rng)
    rep = het.ceo_noise(s, comb)
    i, j = 1, 3
    m, mp = rep.m[i], rep.m[j]
    q, qp = comb.q(m), comb.q(mp)
    n1 = het.fourth_moment_reduced(s, [("a", m, 1), ("a", mp, 1), ("b", qp, 0), ("b", q, 0)])
    n2 = het.fourth_moment_reduced(s, [("a", m, 1), ("a", mp, 0), ("b", qp, 1), ("b", q, 0)])
    assert np.isclose(rep.N1[i, j], n1.real)
    assert np.isclose(rep.N2[i, j], n2.real)


def test_coherent_comb_has_shot_noise_only():
    g = make_grid(8, 1.0)
    s = two_envelope_vacuum(g)
    s.mu_a[:] = 1.0
    s.mu_b[:] = 0.5
    rep = het.ceo_noise(s.to_k(), het.CombSpec(1.0, 0.2, 1))
    assert not np.any(rep.N1) and not np.any(rep.N2)
    assert np.allclose(rep.N_para, 0) and np.allclose(rep.N0, rep.N_shot)


def test_edge_phase_warns_and_z_domain_rejected(rng):
    s, _ = _comb_state(rng)
    with pytest.warns(RuntimeWarning, match="edge"):
        het.ceo_noise(s, het.CombSpec(1.0, 0.25, 2))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        het.ceo_noise(s, het.CombSpec(1.0, 0.3, 2))
    with pytest.raises(ValueError, match="k-space"):
        het.ceo_noise(s.to_z(), het.CombSpec(1.0, 0.3, 2))
    with pytest.raises(ValueError, match="k-space"):
        het.ceo_signal(s.to_z(), het.CombSpec(1.0, 0.3, 2))

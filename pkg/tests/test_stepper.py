import numpy as np
import pytest

from gssf import chi3
from gssf.dispersion import DispersionSpec
from gssf.stepper import (ConservationWarning, NumericalAbort, StepPlan, integrate, step)


def test_plan_validation():
    p = StepPlan(1.0, 10, checkpoints=(3, 0))
    assert p.checkpoints == (0, 3, 10)
    assert p.dt == 0.1
    for bad in (dict(steps=0), dict(steps=2.5), dict(t_final=0.0), dict(scheme="euler"),
                dict(checkpoints=(11,)), dict(checkpoints=(-1,))):
        kw = dict(t_final=1.0, steps=10) | bad
        with pytest.raises(ValueError):
            StepPlan(**kw)
    assert StepPlan.every(1.0, 10, 2).checkpoints == (0, 5, 10)


def _ident(y, h):
    return y


def test_step_rejects_unknown_scheme():
    with pytest.raises(ValueError):
        step((np.ones(1),), lambda y: y, _ident, 0.1, "leapfrog")


@pytest.mark.parametrize("scheme", ["rk4ip", "strang-rk4"])
def test_pure_nonlinear_flow_is_rk4(scheme):
    # with no linear part both schemes reduce to classical RK4 on y' = -y
    y = (np.array([1.0 + 0j]),)
    for _ in range(10):
        y = step(y, lambda v: (-v[0],), _ident, 0.1, scheme)
    assert abs(y[0][0] - np.exp(-1.0)) < 1e-6


@pytest.mark.parametrize("scheme, order", [("rk4ip", 4), ("strang-rk4", 2)])
def test_convergence_order(scheme, order):
    n = 200.0
    g = chi3.soliton_grid(n, 32)
    s0 = chi3.soliton_state(g, n)
    s0.mu = s0.mu * 1.3  # higher-order soliton: dispersion and nonlinearity do not balance
    t_n, _ = chi3.soliton_scales(n, -1.0, 1.0)
    disp = DispersionSpec.polynomial(g, gvd=1.0)

    def run(steps):
        p = chi3.Chi3Params(-1.0, disp, 0.2 * t_n, steps, model="linearized", scheme=scheme)
        return chi3.chi3_propagate(s0, p).final.mu

    ref = run(640)
    errs = [np.linalg.norm(run(k) - ref) for k in (20, 40)]
    observed = np.log2(errs[0] / errs[1])
    assert abs(observed - order) < 0.6


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_numerical_abort_carries_last_good():
    calls = {"n": 0}

    def rhs(y):
        calls["n"] += 1
        return (np.full_like(y[0], np.inf) if calls["n"] > 20 else -y[0],)

    plan = StepPlan(1.0, 10, "rk4ip", (0, 2, 4))
    with pytest.raises(NumericalAbort) as info:
        integrate((np.ones(3, complex),), rhs, _ident, plan, wrap=lambda y: ("state", y))
    t, st = info.value.last_good
    assert np.isclose(t, 0.4)
    assert st[0] == "state"
    assert "step 6" in str(info.value)


def test_conservation_warning_only_when_lossless():
    plan = StepPlan(1.0, 4, checkpoints=(0,))
    args = ((np.ones(2, complex),), lambda y: (-y[0],), _ident, plan)
    inv = lambda y: np.sum(np.abs(y[0]) ** 2)  # noqa: E731
    with pytest.warns(ConservationWarning):
        integrate(*args, invariant=inv, lossless=True)
    traj = integrate(*args, invariant=inv, lossless=False)
    assert traj.max_invariant_drift() > 0.5
    assert len(traj.times) == 2 and traj.final[0].shape == (2,)


def test_symmetrize_is_applied():
    seen = []
    plan = StepPlan(1.0, 3)

    def sym(y):
        seen.append(1)
        return y

    integrate((np.zeros(1, complex),), lambda y: (0 * y[0],), _ident, plan, symmetrize=sym)
    assert len(seen) == 3

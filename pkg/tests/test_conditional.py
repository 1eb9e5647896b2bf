import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from rydvortex.conditional import (ObservableCurve, evolve_conditional, observables,
                                   phase_step_time, slaved_field_operator, unwrap_from_end,
                                   wrap_phase)
from rydvortex.single_photon import propagation_rate, reduced_coupling


@pytest.fixture(scope="module")
def run74(coarse_od74):
    return evolve_conditional(coarse_od74, tau_max=2.0, dt=0.01)


def test_slaved_field_matches_ode(lab):
    """Trapezoid operator vs an adaptive integration of de/dx = k e + i a p.

    The operator acts on p - p_ref, where p_ref = i k / a keeps e = 1 stationary.
    """
    p = lab.replace(OD=60.0)
    x = np.linspace(-5 * p.sigma, 5 * p.sigma, 801)
    h = x[1] - x[0]
    k = propagation_rate(p, x)
    a = reduced_coupling(p, x)
    src = 0.3 * np.exp(-((x - 20.0) / 40.0) ** 2) * (1 + 0.5j)
    e = 1.0 + slaved_field_operator(k, a, h) @ src
    pol = 1j * k / a + src

    def rhs(xx, y):
        kk = np.interp(xx, x, k.real) + 1j * np.interp(xx, x, k.imag)
        aa = np.interp(xx, x, a.real) + 1j * np.interp(xx, x, a.imag)
        ss = np.interp(xx, x, pol.real) + 1j * np.interp(xx, x, pol.imag)
        return kk * y + 1j * aa * ss

    ref = solve_ivp(rhs, (x[0], x[-1]), [1.0 + 0j], t_eval=x, rtol=1e-10, atol=1e-12,
                    max_step=h).y[0]
    assert np.max(np.abs(e - ref)) < 1e-4 * np.max(np.abs(ref))


def test_free_state_is_stationary(free_solve):
    run = evolve_conditional(free_solve, tau_max=1.0, dt=0.05)
    assert np.max(np.abs(run.e - 1)) < 1e-8


def test_initial_slice_is_reproduced(coarse_od74, run74):
    assert np.max(np.abs(run74.e[0] - coarse_od74.normalized("EE")[-1, :])) < 1e-10


def test_step_size_only_sets_sampling(coarse_od74, run74):
    fine = evolve_conditional(coarse_od74, tau_max=2.0, dt=0.005)
    assert np.max(np.abs(fine.e[::2] - run74.e)) < 1e-8


def test_detection_order_is_symmetric(coarse_od74):
    r1 = evolve_conditional(coarse_od74, tau_max=0.5, dt=0.05, detected=1)
    r2 = evolve_conditional(coarse_od74, tau_max=0.5, dt=0.05, detected=2)
    assert np.max(np.abs(r1.e - r2.e)) < 1e-8


def test_correlations_decay(run74):
    c = observables(run74)
    assert c.g2[-1] == pytest.approx(1.0, abs=0.05)
    assert abs(c.phi2[-1]) < 0.1
    assert c.g2[0] > 1.0  # bunched at zero delay


def test_run_indexing(run74):
    st8 = run74[8]
    assert st8.tau == pytest.approx(0.08)
    assert len(list(run74)) == len(run74) == 201


def test_invalid_times(coarse_od74):
    with pytest.raises(ValueError):
        evolve_conditional(coarse_od74, tau_max=1.0, dt=0.0)
    with pytest.raises(ValueError):
        evolve_conditional(coarse_od74, tau_max=1.0, dt=0.3)
    with pytest.raises(ValueError):
        evolve_conditional(coarse_od74, detected=3)


@given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=50))
def test_wrap_phase_range(vals):
    w = wrap_phase(np.array(vals))
    assert np.all(w > -np.pi) and np.all(w <= np.pi)
    assert np.allclose(np.exp(1j * w), np.exp(1j * np.array(vals)), atol=1e-9)


@given(st.lists(st.floats(-3.1, 3.1, allow_nan=False), min_size=2, max_size=60))
def test_unwrap_from_end_keeps_last_sample(steps):
    phi = wrap_phase(np.cumsum(steps))
    u = unwrap_from_end(phi)
    assert u[-1] == phi[-1]
    assert np.all(np.abs(np.diff(u)) <= np.pi + 1e-12)
    assert np.allclose(np.exp(1j * u), np.exp(1j * phi))


def test_phase_step_time_synthetic():
    tau = np.linspace(0, 1, 101)
    phi = np.where(tau < 0.305, 0.0, -2.5)
    c = ObservableCurve(tau, np.ones_like(tau), phi, unwrap_from_end(phi))
    assert phase_step_time(c) == pytest.approx(0.305)

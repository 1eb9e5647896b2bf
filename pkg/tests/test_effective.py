import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rydvortex.effective import (FIRST_VORTEX_PHASE, PHI0, Z0, EffectivePotential,
                                 analytic_phase_boundary, bound_energy_threshold,
                                 bound_state_solve, calibrated_delta_well, continuum_integral,
                                 default_r_grid, delta_potential_solution, dirac_evolve,
                                 erfi_closed_form, schrodinger_evolve, taylor_form,
                                 vortex_positions_analytic)

lams = st.floats(0.01, 10.0)
phis = st.floats(0.1, 20.0)


@given(lams, phis)
def test_lambda_phi_round_trip(lam, phi):
    pot = EffectivePotential.from_lambda_phi(lam, phi, r_b=3.0)
    assert pot.lam == pytest.approx(lam, rel=1e-12)
    assert pot.phi == pytest.approx(phi, rel=1e-12)
    assert pot.m == pytest.approx(-pot.U / 8)


@given(lams)
def test_delta_energy_is_lambda_U(lam):
    pot = EffectivePotential.from_lambda_phi(lam, 1.0)
    assert pot.E2_delta == pytest.approx(lam * pot.U, rel=1e-12)


@given(lams)
def test_threshold_formula_limits(lam):
    assert bound_energy_threshold(lam) == pytest.approx(3 * math.pi / (8 * lam), rel=1e-12)
    weak, strong = analytic_phase_boundary(np.array([lam]))
    assert weak[0] * lam == pytest.approx(PHI0)
    assert strong[0] == pytest.approx(PHI0)


def test_constants():
    assert Z0 == pytest.approx(1.853, abs=5e-4)
    w = Z0 - 1
    assert w * math.exp(w) == pytest.approx(math.pi * math.sqrt(3) / math.e, rel=1e-12)
    assert PHI0 / math.pi == pytest.approx(0.94, abs=0.005)


@given(st.one_of(st.just(0.0), st.floats(1e-4, 8.0)))
@settings(max_examples=25, deadline=None)
def test_expansion_is_one_at_entry(z):
    """Bound plus continuum parts rebuild the initial condition psi = 1."""
    psi = delta_potential_solution(1.0, -0.25, 1.0, z, 0.0)
    assert abs(psi - 1) < 1e-8


@given(st.floats(0.01, 20.0), st.floats(0.0, 6.0))
@settings(max_examples=25, deadline=None)
def test_continuum_integral_conjugation(alpha, z):
    assert continuum_integral(-alpha, z) == pytest.approx(np.conj(continuum_integral(alpha, z)))


def test_erfi_form_within_its_error_estimate():
    lam, m, r_b = 1.0, -0.25, 1.0
    E2 = 2.0
    z = np.linspace(0, 3, 7)
    for alpha in (6 * np.pi, 20 * np.pi):
        quad = delta_potential_solution(lam, m, r_b, z, alpha / E2)
        ev = erfi_closed_form(lam, m, r_b, z, alpha / E2)
        assert np.max(np.abs(ev.psi - quad)) < 2 * np.max(ev.dropped)
        tay = taylor_form(lam, m, r_b, z[:2], alpha / E2)
        assert np.max(np.abs(tay.psi - quad[:2])) < 2 * np.max(tay.dropped) + 1e-3
    with pytest.raises(ZeroDivisionError):
        erfi_closed_form(lam, m, r_b, 0.0, 0.0)


def test_first_vortex_near_prediction():
    """The quadrature solution winds once around the predicted first position."""
    lam, m, r_b = 1.0, -0.25, 1.0
    av = vortex_positions_analytic(lam, m, r_b, k_max=0)
    assert av.R[0] * av.E2 == pytest.approx(FIRST_VORTEX_PHASE)
    th = np.linspace(0, 2 * np.pi, 33)
    R = av.R[0] + 0.3 * np.cos(th)
    r = av.r + 0.6 * np.sin(th)
    psi = delta_potential_solution(lam, m, r_b, r, R)
    assert round(np.sum(np.angle(psi[1:] / psi[:-1])) / (2 * np.pi)) == -1


def test_square_well_binds_at_delta_energy():
    pot = EffectivePotential.from_lambda_phi(0.5, 1.0)
    r = default_r_grid(pot.delta_well(), 5.0, 400.0)
    cal = calibrated_delta_well(pot, r)
    b = bound_state_solve(cal, r)
    assert b.E2 == pytest.approx(pot.E2_delta, rel=1e-8)
    assert b.prefactor == pytest.approx(2.0, rel=0.02)
    assert cal.depth_scale == pytest.approx(1.0, abs=0.01)


def test_vdw_bound_state_approaches_delta_limit():
    """Weak wells bind like a delta well of the same weight."""
    ratios = []
    for lam in (0.3, 0.1):
        pot = EffectivePotential.from_lambda_phi(lam, 1.0)
        ratios.append(bound_state_solve(pot).E2 / pot.E2_delta)
    assert abs(ratios[1] - 1) < abs(ratios[0] - 1) < 0.6


def test_split_step_matches_crank_nicolson():
    pot = EffectivePotential.from_lambda_phi(1.0, 2.0)
    r = default_r_grid(pot, pot.L, 20.0)
    R = np.linspace(0, pot.L, 5)
    a = schrodinger_evolve(pot, r=r, R_out=R, dR=pot.L / 4000)
    b = schrodinger_evolve(pot, r=r, R_out=R, dR=pot.L / 4000, method="crank-nicolson")
    w = np.abs(r) < 0.25 * r[-1]
    assert np.max(np.abs(a.values[w] - b.values[w])) < 5e-3


def test_dirac_evolution_is_unitary():
    pot = EffectivePotential.from_lambda_phi(1.0, 2.0)
    d = dirac_evolve(pot, R_out=np.linspace(0, pot.L, 5))
    norm = np.sum(np.abs(d.psi.values) ** 2 + np.abs(d.rho.values) ** 2, axis=0)
    assert np.allclose(norm, norm[0], rtol=1e-10)
    assert np.all(d.rho.values[:, 0] == 0)


def test_potential_validation():
    with pytest.raises(ValueError):
        EffectivePotential(U=1.0, r_b=0.0, m=-0.1)
    with pytest.raises(ValueError):
        EffectivePotential(U=1.0, r_b=1.0, m=-0.1, profile="gaussian")
    with pytest.raises(ValueError):
        EffectivePotential.from_lambda_phi(0.0, 1.0)
    with pytest.raises(ValueError):
        bound_state_solve(EffectivePotential(U=1.0, r_b=1.0, m=0.1))


def test_gaussian_mass_cutoff():
    pot = EffectivePotential(U=0.1, r_b=1.0, m=-0.0125, L=100.0, profile="gaussian", sigma=20.0)
    with pytest.raises(ValueError):
        schrodinger_evolve(pot, R_out=np.linspace(-100, 0, 5))


def test_split_step_is_unitary():
    pot = EffectivePotential.from_lambda_phi(0.5, 3.0)
    f = schrodinger_evolve(pot, R_out=np.linspace(0, pot.L, 6))
    norm = np.sum(np.abs(f.values) ** 2, axis=0)
    assert np.allclose(norm, norm[0], rtol=1e-10)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rydvortex.three_photon import (S3_MATRICES, ThreePhotonAnsatz, ansatz_disconnected_g3,
                                    central_phase, connected_g3, cylinder_punctures,
                                    disconnected_g3, group_velocity, jacobi_forward,
                                    jacobi_inverse, pair_separations,
                                    pairwise_extrapolation_psi3, phase_topology, phi3_and_g3,
                                    ring_cross_section, s3_orbit, sixfold_symmetrize, to_length,
                                    to_time)

coord = st.floats(-8.0, 8.0)
CFG = ThreePhotonAnsatz(E2=1.0, E3=3.0, a=1.0)


@given(coord, coord, coord)
def test_jacobi_round_trip(t1, t2, t3):
    q = jacobi_forward(t1, t2, t3)
    c = (t1 + t2 + t3) / 3
    back = jacobi_inverse(q.eta, q.zeta, c)
    assert np.allclose(back, (t1, t2, t3), atol=1e-9)
    t21, t13, t23 = pair_separations(q.eta, q.zeta)
    assert np.allclose([t21, t13, t23], [t2 - t1, t1 - t3, t2 - t3], atol=1e-9)


def test_s3_matrices_form_orthogonal_group():
    assert len(S3_MATRICES) == 6
    assert np.allclose(S3_MATRICES[0], np.eye(2))
    for M in S3_MATRICES:
        assert np.allclose(M @ M.T, np.eye(2), atol=1e-12)
        assert any(np.allclose(M @ N, K) for N in S3_MATRICES for K in S3_MATRICES)
    dets = sorted(round(float(np.linalg.det(M))) for M in S3_MATRICES)
    assert dets == [-1, -1, -1, 1, 1, 1]


@given(coord, coord, st.floats(0.0, 10.0), st.floats(1.5, 5.0), st.booleans())
@settings(max_examples=60)
def test_ansatz_is_s3_invariant(eta, zeta, R, ratio, three_body):
    cfg = ThreePhotonAnsatz(E2=0.7, E3=ratio * 0.7, a=1.3, include_three_body=three_body)
    ref = cfg.psi(eta, zeta, R)
    for e, z in s3_orbit(eta, zeta):
        assert cfg.psi(e, z, R) == pytest.approx(ref, abs=1e-10)


@given(coord, coord)
def test_ansatz_starts_uncorrelated(eta, zeta):
    assert CFG.psi(eta, zeta, 0.0) == pytest.approx(1.0)


def test_ansatz_origin_value():
    """At the origin psi = 13 + 6 e^{-i E2 R} - 18 e^{-i E3 R}."""
    R = 0.37
    ref = 13 + 6 * np.exp(-1j * R) - 18 * np.exp(-3j * R)
    assert CFG.psi(0.0, 0.0, R) == pytest.approx(ref)


def test_far_third_photon_reduces_to_pair():
    eta = np.linspace(-3, 3, 13)
    far = 60.0
    assert np.allclose(CFG.psi(eta, far, 2.1), CFG.pair_psi(math.sqrt(2) * eta, 2.1), atol=1e-12)


def test_connected_vanishes_without_correlation():
    assert abs(connected_g3(CFG, 40.0, 40.0, 1.0)) < 1e-12
    gd = ansatz_disconnected_g3(CFG, 0.0, 0.0, np.pi)
    assert gd == pytest.approx(3 * 9 - 2)  # pair g2 at the origin is |1 - 2 * 2|^2 = 9


def test_disconnected_g3_from_curve():
    tau = np.linspace(0, 1, 11)
    g2 = 1 + 4 * np.exp(-tau / 0.2)
    assert disconnected_g3((tau, g2), 0.0, 0.0) == pytest.approx(3 * 5 - 2)
    assert disconnected_g3((tau, g2), 50.0, 50.0) == pytest.approx(1.0)


def test_pairwise_extrapolation_limits():
    tau = np.linspace(0, 1, 11)
    g2 = np.full_like(tau, 4.0)
    ph = np.full_like(tau, -np.pi / 2)
    psi = pairwise_extrapolation_psi3((tau, g2), (tau, ph), 0.0, 0.0)
    assert psi == pytest.approx(3 * 2 * np.exp(-0.5j * np.pi) - 2)
    assert pairwise_extrapolation_psi3((tau, g2), (tau, ph), 50.0, 50.0) == pytest.approx(1.0)


def test_sixfold_symmetrize_grid_matches_callable():
    def f(e, z):
        return np.exp(-((e - 0.4) ** 2 + (z + 0.2) ** 2))

    g = np.linspace(-4, 4, 161)
    E, Z = np.meshgrid(g, g, indexing="ij")
    exact = sixfold_symmetrize(f)(E, Z)
    grid = sixfold_symmetrize(f(E, Z), g, g)
    inner = E ** 2 + Z ** 2 < 9
    assert np.max(np.abs(grid - exact)[inner]) < 2e-3
    sym = sixfold_symmetrize(f)
    for e, z in s3_orbit(0.3, 1.1):
        assert sym(e, z) == pytest.approx(sym(0.3, 1.1))


def test_slice_resolution_check():
    g = np.linspace(-3, 3, 31)
    with pytest.raises(ValueError):
        phi3_and_g3(CFG, g, g, 1.0)
    s = phi3_and_g3(CFG, np.linspace(-3, 3, 61), np.linspace(-3, 3, 61), 1.0)
    assert np.all(s.phi3 > -np.pi) and np.all(s.phi3 <= np.pi)
    assert np.allclose(s.g3, np.abs(s.field.values) ** 2)


def test_central_phase_reaches_minus_two_pi():
    R, ph = central_phase(CFG, np.pi)
    assert ph[0] == pytest.approx(0.0)
    assert ph[-1] == pytest.approx(-2 * np.pi, abs=1e-9)


def test_topology_frozen_values():
    e = np.linspace(-6.03, 6.03, 121)
    R = np.linspace(0.01, 1.6 * np.pi, 81)
    full = phase_topology(CFG, e, e, R)
    assert (full.n_lines, full.n_rings) == (6, 1)
    pair_only = phase_topology(CFG.without_three_body(), e, e, R)
    assert (pair_only.n_lines, pair_only.n_rings) == (6, 0)
    early = phase_topology(ThreePhotonAnsatz(E2=1.0, E3=4.0, a=1.0), e, e, R)
    assert early.first_R("rings") == pytest.approx(0.653 * np.pi, abs=0.02)
    assert early.first_R("rings") < early.first_R("lines")


def test_cylinder_punctures_alternate():
    v = cylinder_punctures(CFG, 5.0, np.linspace(0.5 * np.pi, 1.5 * np.pi, 201))
    ang = np.sort(np.degrees(v.positions[:, 0]))
    assert len(v) == 12 and v.total_charge == 0
    expected = np.sort(np.concatenate([18.5 + 60 * np.arange(-3, 3), 41.5 + 60 * np.arange(-3, 3)]))
    expected = np.sort(np.where(expected > 180, expected - 360, expected))
    assert np.allclose(ang, expected, atol=0.3)


def test_ring_cross_section():
    rc = ring_cross_section(CFG, np.linspace(-3, 3, 301), np.linspace(0.5 * np.pi, 1.5 * np.pi, 201))
    rows = sorted(rc.rows())
    assert [r[2] for r in rows] == [-1, 1]
    assert rows[1][0] == pytest.approx(0.658, abs=2e-3)
    assert rows[0][0] == pytest.approx(-rows[1][0])


def test_group_velocity_frozen(lab):
    v = group_velocity(lab)
    assert v == pytest.approx(118.13, rel=1e-3)
    assert to_length(to_time(3.0, v), v) == pytest.approx(3.0)


def test_from_lambda():
    cfg = ThreePhotonAnsatz.from_lambda(0.5, 10.0)
    assert cfg.a == pytest.approx(20.0)
    assert cfg.E2 == pytest.approx(0.5 * 2 * math.sqrt(0.5) / 10.0)
    assert cfg.E3_ratio == pytest.approx(3.0)
    with pytest.raises(ValueError):
        ThreePhotonAnsatz(E2=1.0, E3=3.0, a=0.0)

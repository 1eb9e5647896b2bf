"""Single-photon EIT propagation: steady state, spectra and polariton mass.

Atomic amplitudes are reported in two normalisations.  ``P`` and ``S`` are
the physical closed-form amplitudes (they carry ``g sqrt(rho)``, which is
of order ``sqrt(c)``).  The solvers work with the reduced amplitudes
``P / sqrt(c)`` and ``S / sqrt(c)`` instead, which are of order one; see
:func:`reduced_coupling`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from rydvortex.params import PhysicalParams, coupling_density_peak


def _detunings(p, delta, Delta):
    if delta is None:
        delta = p.delta
        if Delta is None:
            Delta = p.Delta
    elif Delta is None:
        Delta = np.asarray(delta, dtype=float) - p.Delta_c
    return np.asarray(delta, dtype=float), np.asarray(Delta, dtype=float)


def response(p: PhysicalParams, delta=None, Omega=None, Delta=None):
    """Dimensionless linear response Gamma / (Gamma - i Delta + Omega^2/(gamma - i delta)).

    Re(kappa) is the field attenuation per OD/2 and -Im(kappa) the phase.
    When ``delta`` is given without ``Delta`` the control detuning is held
    fixed, so the probe detuning follows as ``Delta = delta - Delta_c``.
    """
    delta, Delta = _detunings(p, delta, Delta)
    Omega = p.Omega if Omega is None else Omega
    A = p.Gamma - 1j * Delta
    if Omega == 0:
        return p.Gamma / A
    B = p.gamma - 1j * delta
    return p.Gamma * B / (A * B + Omega ** 2)


def atomic_denominator(p: PhysicalParams, delta=None, Omega=None, Delta=None):
    """Gamma - i Delta + Omega^2 / (gamma - i delta); infinite at exact lossless EIT."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return p.Gamma / response(p, delta, Omega, Delta)


def susceptibility(p: PhysicalParams, delta=None, Omega=None, Delta=None):
    """chi = i * kappa: Im chi >= 0 is absorption, Re chi the refractive part."""
    return 1j * response(p, delta, Omega, Delta)


def density_profile(p: PhysicalParams, x):
    """Normalised Gaussian density rho(x) / rho0."""
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * (x / p.sigma) ** 2)


def cumulative_density(p: PhysicalParams, x):
    """Fraction of the cloud's column density lying left of ``x``."""
    return special.ndtr(np.asarray(x, dtype=float) / p.sigma)


def reduced_coupling(p: PhysicalParams, x):
    """g sqrt(rho(x)) / sqrt(c), in sqrt(rad/(us um))."""
    return np.sqrt(coupling_density_peak(p)) * np.exp(-0.25 * (np.asarray(x, float) / p.sigma) ** 2)


def propagation_rate(p: PhysicalParams, x, Omega=None):
    """Local rate k(x) in dE/dx = -k(x) E, in 1/um."""
    a = reduced_coupling(p, x)
    return a * a * response(p, Omega=Omega) / p.Gamma


def reduced_atomic_ratios(p: PhysicalParams, a, Omega=None):
    """Steady-state P/(sqrt(c) E) and S/(sqrt(c) E) for local coupling ``a``."""
    Om = p.Omega if Omega is None else Omega
    A = p.Gamma - 1j * p.Delta
    B = p.gamma - 1j * p.delta
    a = np.asarray(a)
    if Om == 0:
        return 1j * a / A, np.zeros_like(a, dtype=complex)
    den = A * B + Om ** 2
    return 1j * a * B / den, -Om * a / den + 0j


@dataclass(frozen=True)
class SinglePhotonState:
    x: np.ndarray
    E: np.ndarray
    P: np.ndarray
    S: np.ndarray
    p_reduced: np.ndarray
    s_reduced: np.ndarray

    @property
    def transmission(self):
        return abs(self.E[-1]) ** 2


def steady_state(p: PhysicalParams, x, Omega=None) -> SinglePhotonState:
    """Closed-form steady state on the grid ``x`` (input field E(-inf) = 1)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or np.any(np.diff(x) <= 0):
        raise ValueError("x grid must be one-dimensional and strictly increasing")
    Om = p.Omega if Omega is None else Omega
    kappa = response(p, Omega=Om)
    E = np.exp(-0.5 * p.OD * kappa * cumulative_density(p, x))
    a = reduced_coupling(p, x)
    p_red, s_red = reduced_atomic_ratios(p, a, Omega=Om)
    root_c = math.sqrt(p.c)
    return SinglePhotonState(
        x=x, E=E, P=root_c * p_red * E, S=root_c * s_red * E,
        p_reduced=p_red, s_reduced=s_red,
    )


def output_field(p: PhysicalParams, delta=None, Omega=None):
    """E(+inf) for the whole cloud: exp(-(OD/2) kappa)."""
    return np.exp(-0.5 * p.OD * response(p, delta, Omega))


@dataclass(frozen=True)
class Spectrum:
    delta: np.ndarray
    T3: np.ndarray
    T2: np.ndarray
    phase3: np.ndarray
    phase2: np.ndarray

    def rows(self):
        return np.column_stack([self.delta / (2 * math.pi), self.T3, self.T2,
                                self.phase3, self.phase2])


def transmission_spectrum(p: PhysicalParams, deltas) -> Spectrum:
    """Three-level and blockaded (Omega = 0) transmission and phase versus delta.

    The control detuning is held fixed while the probe is scanned.  Phases
    are the unwrapped ``-(OD/2) Im kappa`` rather than wrapped arguments.
    """
    deltas = np.asarray(deltas, dtype=float)
    k3 = response(p, deltas)
    k2 = response(p, deltas, Omega=0.0)
    return Spectrum(
        delta=deltas,
        T3=np.exp(-p.OD * k3.real),
        T2=np.exp(-p.OD * k2.real),
        phase3=-0.5 * p.OD * k3.imag,
        phase2=-0.5 * p.OD * k2.imag,
    )


@dataclass(frozen=True)
class MassResult:
    m: float
    m_eit: float
    q: float
    q_approx: float
    step: float


def _mass_at(p, delta, Delta_c, h):
    def re_chi(d):
        return susceptibility(p, d, Delta=d - Delta_c).real

    f0, fp, fm = re_chi(delta), re_chi(delta + h), re_chi(delta - h)
    d1 = (fp - fm) / (2 * h)
    d2 = (fp - 2 * f0 + fm) / h ** 2
    if abs(d2) < 1e-12:
        raise ArithmeticError("dispersion curvature vanishes; polariton mass undefined")
    return 0.25 * d1 * d1 / d2


def mass_from_susceptibility(p: PhysicalParams, rel_step: float = 1e-3) -> MassResult:
    """Polariton mass from the curvature of Re chi and the ratio q = m(delta)/m(0).

    Derivatives are central differences with step ``rel_step * Omega``,
    taken along the probe scan (control detuning fixed).  ``q_approx`` is
    the small-linewidth closed form of the same ratio.
    """
    h = rel_step * p.Omega
    m = _mass_at(p, p.delta, p.Delta_c, h)
    m_eit = _mass_at(p, 0.0, p.Delta_c, h)
    W2, D, d = p.Omega ** 2, p.Delta, p.delta
    q_approx = 1.0 / (1.0 - d * D / W2 + 2 * d / D - 4 * d * d / W2)
    return MassResult(m=m, m_eit=m_eit, q=m / m_eit, q_approx=q_approx, step=h)

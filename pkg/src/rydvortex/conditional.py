"""Second-photon dynamics after the first photon is detected at the outflow.

Fields are normalised as in the two-photon solver: ``e`` is divided by
E(x_out) E(x2) and the atomic amplitudes additionally by sqrt(c).  In these
variables the uncorrelated single-photon steady state is the constant
e = 1 and is exactly stationary.

Photon transport is instantaneous on the microsecond scale, so the field is
slaved to the atoms: at every instant e solves c de/dx = i g sqrt(rho) p.
That turns the problem into a linear ODE for (p, s) alone, which is
advanced with the exact propagator expm(M dt).  Nothing in the scheme
depends on dt being small, it only sets the sampling of tau.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from rydvortex.single_photon import propagation_rate, reduced_coupling
from rydvortex.two_photon import AmplitudeGrid2

DEFAULT_TAU_MAX = 4.0  # us
DEFAULT_DT = 0.002  # us


@dataclass(frozen=True)
class ConditionalState:
    """Normalised second-photon amplitudes at one delay ``tau``."""

    tau: float
    x2: np.ndarray
    e: np.ndarray
    p: np.ndarray
    s: np.ndarray


@dataclass(frozen=True)
class ConditionalRun:
    """All sampled delays of one conditional evolution; indexable like a list."""

    tau: np.ndarray
    x2: np.ndarray
    e: np.ndarray  # (n_tau, n_x)
    p: np.ndarray
    s: np.ndarray
    OD: float
    meta: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return self.tau.size

    def __getitem__(self, k) -> ConditionalState:
        return ConditionalState(float(self.tau[k]), self.x2, self.e[k], self.p[k], self.s[k])

    def __iter__(self):
        return (self[k] for k in range(len(self)))


@dataclass(frozen=True)
class ObservableCurve:
    tau: np.ndarray
    g2: np.ndarray
    phi2: np.ndarray
    phi2_unwrapped: np.ndarray
    OD: float = float("nan")

    def rows(self):
        return np.column_stack([self.tau, self.g2, self.phi2, self.phi2_unwrapped])


def slaved_field_operator(k, a, h):
    """Matrix T with e = 1 + T (p - p_ref) for the trapezoid rule of de/dx = k e + i a p.

    Row 0 is zero because the inflow value of e is fixed.
    """
    n = k.size
    T = np.zeros((n, n), dtype=complex)
    den = 1.0 - 0.5 * h * k[1:]
    grow = (1.0 + 0.5 * h * k[:-1]) / den
    src = 0.5j * h / den
    for j in range(n - 1):
        T[j + 1] = grow[j] * T[j]
        T[j + 1, j] += src[j] * a[j]
        T[j + 1, j + 1] += src[j] * a[j + 1]
    return T


def _initial_slice(a: AmplitudeGrid2, detected: int):
    u = a.reduced
    if detected == 1:
        return u[0, -1, :], u[1, -1, :], u[3, -1, :]
    if detected == 2:
        return u[0, :, -1], u[2, :, -1], u[4, :, -1]
    raise ValueError("detected must be 1 or 2")


def evolve_conditional(a: AmplitudeGrid2, tau_max: float = DEFAULT_TAU_MAX,
                       dt: float = DEFAULT_DT, detected: int = 1) -> ConditionalRun:
    """Evolve the remaining photon after detecting photon ``detected`` at x_out.

    The initial slice is the two-photon steady state at x_detected = x_out.
    The returned fields are sampled at tau = 0, dt, 2 dt, ..., tau_max.
    """
    if not dt > 0 or not tau_max > 0:
        raise ValueError("tau_max and dt must be positive")
    n_steps = int(round(tau_max / dt))
    if n_steps < 1 or abs(n_steps * dt - tau_max) > 1e-9 * tau_max:
        raise ValueError("tau_max must be a positive multiple of dt")

    p = a.params
    x = a.x2
    n = x.size
    h = float(x[1] - x[0])
    cpl = reduced_coupling(p, x)
    k = propagation_rate(p, x)
    A = p.Gamma - 1j * p.Delta
    B = p.gamma - 1j * p.delta
    W = p.Omega

    e0, p0, s0 = (np.array(v, dtype=complex) for v in _initial_slice(a, detected))
    T = slaved_field_operator(k, cpl, h)

    # d/dt [p; s] = M [p; s] + b  with  e = e0 + T (p - p0)
    M = np.zeros((2 * n, 2 * n), dtype=complex)
    M[:n, :n] = 1j * cpl[:, None] * T
    M[:n, :n] -= A * np.eye(n)
    M[:n, n:] = 1j * W * np.eye(n)
    M[n:, :n] = 1j * W * np.eye(n)
    M[n:, n:] = -B * np.eye(n)
    b = np.zeros(2 * n, dtype=complex)
    b[:n] = 1j * cpl * (e0 - T @ p0)

    # exact step: y(t+dt) = y* + Phi (y(t) - y*), y* the fixed point
    y_star = np.linalg.solve(M, -b)
    step = linalg.expm(M * dt)
    y = np.concatenate([p0, s0])
    ys = np.empty((n_steps + 1, 2 * n), dtype=complex)
    ys[0] = y
    dev = y - y_star
    for i in range(1, n_steps + 1):
        dev = step @ dev
        ys[i] = y_star + dev
    ys[0] = y  # keep the exact initial slice
    P, S = ys[:, :n], ys[:, n:]
    E = e0[None, :] + (P - p0[None, :]) @ T.T
    tau = dt * np.arange(n_steps + 1)
    meta = {"dt_us": dt, "tau_max_us": tau_max, "detected": detected, "n_x": n}
    return ConditionalRun(tau=tau, x2=x, e=E, p=P, s=S, OD=p.OD, meta=meta)


def unwrap_from_end(phi):
    """Unwrap a phase curve starting from its last sample, which is kept fixed."""
    return np.unwrap(np.asarray(phi)[::-1])[::-1]


def wrap_phase(phi):
    """Wrap to (-pi, pi]; -pi itself maps to +pi."""
    w = np.angle(np.exp(1j * np.asarray(phi)))
    return np.where(w <= -np.pi, np.pi, w)


def observables(run: ConditionalRun) -> ObservableCurve:
    """g2(tau) = |e(tau, x_out)|^2 and phi2(tau) = arg e(tau, x_out)."""
    e_out = run.e[:, -1]
    phi = wrap_phase(np.angle(e_out))
    return ObservableCurve(tau=run.tau, g2=np.abs(e_out) ** 2, phi2=phi,
                           phi2_unwrapped=unwrap_from_end(phi), OD=run.OD)


def phase_step_time(curve: ObservableCurve, window=(0.02, None)) -> float:
    """Delay of the largest jump of the wrapped phase between neighbouring samples."""
    lo, hi = window
    mask = curve.tau[1:] >= lo
    if hi is not None:
        mask &= curve.tau[1:] <= hi
    d = np.abs(np.diff(curve.phi2_unwrapped))
    d = np.where(mask, d, -1.0)
    i = int(np.argmax(d))
    return float(0.5 * (curve.tau[i] + curve.tau[i + 1]))

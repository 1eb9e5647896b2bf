"""Effective one-dimensional models for the relative coordinate of two photons.

The centre-of-mass coordinate R plays the role of time and r = x1 - x2 is
the relative coordinate.  In the Schrodinger picture

    i d/dR psi = -(1/2m) d^2/dr^2 psi + V(r) psi,   V(r) = U / (1 + r^6/r_b^6),

with a negative mass m = -U/8, so the attractive well hosts a bound state
of positive energy E2 whose phase exp(-i E2 R) runs ahead of the slowly
dephasing scattering states.  Vortex pairs form where the two interfere
destructively.

Lengths are in the units of ``r_b`` (any length unit works, U and m are
inverse lengths).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate, linalg, optimize, special

from rydvortex.fields import ComplexField2D
from rydvortex.topology import find_vortices

#: Threshold constant of the analytic phase condition phi >= PHI0 / lambda.
PHI0 = 3.0 * math.sqrt(2.0 * math.pi) * math.pi / 8.0
#: Relative coordinate lambda |r| / r_b of the weak-coupling vortices.
Z0 = 1.0 + float(special.lambertw(math.pi * math.sqrt(3.0) / math.e).real)
FIRST_VORTEX_PHASE = 0.75 * math.pi


@dataclass(frozen=True)
class EffectivePotential:
    """Depth ``U`` and mass ``m`` (both 1/length), range ``r_b``.

    ``profile`` is "uniform" (medium of length L starting at R = 0) or
    "gaussian" (U and m follow the density exp(-R^2/2 sigma^2), scaled so
    that the column density equals that of the uniform medium).  ``shape``
    is "vdw" for the soft-core well or "square" for a narrow square well of
    width ``well_width`` holding the same delta-function strength.
    """

    U: float
    r_b: float
    m: float
    L: float = math.nan
    profile: str = "uniform"
    sigma: float = math.nan
    shape: str = "vdw"
    well_width: float = math.nan
    depth_scale: float = 1.0

    def __post_init__(self):
        if self.r_b <= 0:
            raise ValueError("r_b must be positive")
        if self.profile not in ("uniform", "gaussian"):
            raise ValueError("profile must be 'uniform' or 'gaussian'")
        if self.shape not in ("vdw", "square"):
            raise ValueError("shape must be 'vdw' or 'square'")
        if self.profile == "gaussian" and not self.sigma > 0:
            raise ValueError("gaussian profile needs sigma > 0")
        if self.shape == "square" and not self.well_width > 0:
            raise ValueError("square well needs a positive width")

    @classmethod
    def from_lambda_phi(cls, lam: float, phi: float, r_b: float = 1.0, **kw):
        """Uniform medium with interaction strength ``lam`` and single-photon phase ``phi``."""
        if lam <= 0:
            raise ValueError("lambda must be positive")
        U = 2.0 * math.sqrt(lam) / r_b
        return cls(U=U, r_b=r_b, m=-U / 8.0, L=2.0 * phi / U, **kw)

    @classmethod
    def from_params(cls, p, d=None, enhancement: str = "q", profile: str = "uniform"):
        """Potential for physical parameters; ``enhancement`` picks q or q0 in U."""
        from rydvortex.params import derive_params

        d = derive_params(p) if d is None else d
        q = {"q": d.q, "q0": d.q0}[enhancement]
        U = p.OD / p.L * q * p.Gamma / p.Delta
        return cls(U=float(U), r_b=d.r_b, m=float(-U / 8.0), L=p.L, profile=profile,
                   sigma=p.sigma)

    def delta_well(self, width: float | None = None, depth_scale: float = 1.0) -> "EffectivePotential":
        """Square-well surrogate of width r_b/50 (default) with the delta weight of lambda.

        ``depth_scale`` multiplies the depth; see :func:`calibrated_delta_well`.
        """
        return replace(self, shape="square",
                       well_width=self.r_b / 50.0 if width is None else width,
                       depth_scale=depth_scale)

    @property
    def lam(self) -> float:
        return 2.0 * abs(self.m) * self.r_b ** 2 * abs(self.U)

    @property
    def phi(self) -> float:
        return 0.5 * self.U * self.L

    @property
    def delta_strength(self) -> float:
        """Weight of the delta well equivalent to lambda: lambda / (|m| r_b)."""
        return self.lam / (abs(self.m) * self.r_b)

    @property
    def E2_delta(self) -> float:
        """Bound-state energy of the delta well, -lambda^2 / (2 m r_b^2)."""
        return -self.lam ** 2 / (2.0 * self.m * self.r_b ** 2)

    def V(self, r, h: float | None = None):
        """Potential on ``r``; with a spacing ``h`` the square well is cell-averaged."""
        r = np.asarray(r, dtype=float)
        if self.shape == "vdw":
            return self.U / (1.0 + (r / self.r_b) ** 6)
        depth = math.copysign(self.depth_scale * self.delta_strength / self.well_width, self.U)
        half = 0.5 * self.well_width
        if h is None:
            return np.where(np.abs(r) <= half, depth, 0.0)
        lo = np.maximum(r - 0.5 * h, -half)
        hi = np.minimum(r + 0.5 * h, half)
        return depth * np.clip(hi - lo, 0.0, None) / h

    def profile_factor(self, R):
        """Local density relative to the uniform-medium value."""
        R = np.asarray(R, dtype=float)
        if self.profile == "uniform":
            return np.ones_like(R)
        return self.L / (math.sqrt(2 * math.pi) * self.sigma) * np.exp(-0.5 * (R / self.sigma) ** 2)


# ---------------------------------------------------------------- steppers

def _check_r_grid(pot, r, min_span=12.0):
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or r.size < 8:
        raise ValueError("r grid must be one-dimensional with at least 8 points")
    h = r[1] - r[0]
    if not np.allclose(np.diff(r), h, rtol=1e-9, atol=0):
        raise ValueError("r grid must be uniform")
    if abs(r[0] + r[-1]) > 1e-9 * abs(h) * r.size:
        raise ValueError("r grid must be symmetric about 0")
    if r[-1] - r[0] < min_span * pot.r_b:
        raise ValueError(f"r grid must span at least {min_span} r_b")
    return r, float(h)


def default_r_grid(pot, R_span: float, points_per_rb: float = 10.0) -> np.ndarray:
    """Symmetric grid wide enough for the bound state and the dispersive spread."""
    lam = max(pot.lam, 1e-6)
    spread = math.sqrt(abs(R_span / pot.m)) if pot.m != 0 else 0.0
    # scattered waves leave the well at up to v = kappa/|m| with kappa the bound decay rate
    kappa = math.sqrt(2.0 * abs(pot.m) * min(abs(pot.E2_delta), abs(pot.U)))
    front = kappa / abs(pot.m) * R_span if pot.m != 0 else 0.0
    half = pot.r_b * max(8.0, 6.0 / lam) + 4.0 * spread + 1.5 * front
    h = pot.r_b / points_per_rb
    if pot.shape == "square":
        h = min(h, pot.well_width / 5.0)
    n = int(math.ceil(half / h))
    return h * np.arange(-n, n + 1, dtype=float)


def _R_schedule(R_out, dR):
    R_out = np.asarray(R_out, dtype=float)
    if R_out.ndim != 1 or R_out.size < 1 or np.any(np.diff(R_out) <= 0):
        raise ValueError("R_out must be strictly increasing")
    if not dR > 0:
        raise ValueError("dR must be positive")
    steps = []
    for a, b in zip(R_out[:-1], R_out[1:]):
        n = max(1, int(math.ceil((b - a) / dR - 1e-9)))
        steps.append((a, (b - a) / n, n))
    return R_out, steps


def _mass_limits(pot, R_out, mass_cutoff):
    if pot.profile != "gaussian":
        return
    f = pot.profile_factor(np.array([R_out[0], R_out[-1]]))
    if np.min(f) < mass_cutoff:
        raise ValueError(
            "effective mass diverges towards the cloud edges: the requested R range "
            f"reaches density ratio {np.min(f):.3g} < mass_cutoff {mass_cutoff:.3g}; "
            "use dirac_evolve for the full Gaussian cloud")


def _default_R_out(pot, n_out):
    if pot.profile == "uniform":
        if not pot.L > 0:
            raise ValueError("uniform profile needs a medium length L")
        return np.linspace(0.0, pot.L, n_out)
    return np.linspace(-3.0 * pot.sigma, 3.0 * pot.sigma, n_out)


def _laplacian_bands(n, h):
    return np.full(n, -2.0 / h ** 2), np.full(n - 1, 1.0 / h ** 2)


def schrodinger_evolve(pot: EffectivePotential, r=None, R_out=None, dR=None,
                       n_out: int = 201, mass_cutoff: float = math.exp(-4.5),
                       method: str = "split-step") -> ComplexField2D:
    """Solve the effective Schrodinger equation from psi = 1 at R_out[0].

    ``method`` is "split-step" (Fourier kinetic step, periodic domain) or
    "crank-nicolson" (second-order finite differences with psi = 1 held at
    the domain ends).  The split-step scheme needs dR well below
    2|m| w^2 for a well of width w, so narrow square wells should use
    Crank-Nicolson.  The Gaussian profile is refused where the local
    density (and with it the mass) drops below ``mass_cutoff`` times its
    peak, by default |R| = 3 sigma.
    """
    R_out = _default_R_out(pot, n_out) if R_out is None else np.asarray(R_out, float)
    span = float(R_out[-1] - R_out[0])
    r = default_r_grid(pot, span) if r is None else r
    r, h = _check_r_grid(pot, r)
    _mass_limits(pot, R_out, mass_cutoff)
    dR = span / 2000.0 if dR is None else dR
    R_out, steps = _R_schedule(R_out, dR)
    if method not in ("split-step", "crank-nicolson"):
        raise ValueError("method must be 'split-step' or 'crank-nicolson'")

    V = pot.V(r, h)
    psi = np.ones(r.size, dtype=complex)
    out = np.empty((r.size, R_out.size), dtype=complex)
    out[:, 0] = psi
    k2 = (2 * np.pi * np.fft.fftfreq(r.size, d=h)) ** 2
    lap_d, lap_o = _laplacian_bands(r.size, h)
    for col, (R0, step, n) in enumerate(steps, start=1):
        for s in range(n):
            f = float(pot.profile_factor(R0 + (s + 0.5) * step))
            if method == "split-step":
                half_v = np.exp(-0.5j * step * f * V)
                psi = half_v * psi
                psi = np.fft.ifft(np.exp(-1j * step * k2 / (2.0 * pot.m * f)) * np.fft.fft(psi))
                psi = half_v * psi
            else:
                psi = _cn_step(psi, f * V, -1.0 / (2.0 * pot.m * f), lap_d, lap_o, step)
        out[:, col] = psi
    return ComplexField2D(r, R_out, out, "r", "R",
                          meta={"model": "schrodinger", "method": method, "dR": dR, "h": h})


def _cn_step(psi, V, kin, lap_d, lap_o, dR):
    """One Crank-Nicolson step for phi = psi - 1 with phi = 0 at both ends."""
    phi = psi - 1.0
    d = kin * lap_d + V
    o = kin * lap_o
    Hphi = d * phi
    Hphi[:-1] += o * phi[1:]
    Hphi[1:] += o * phi[:-1]
    rhs = phi - 0.5j * dR * Hphi - 1j * dR * V
    ab = np.zeros((3, phi.size), dtype=complex)
    ab[0, 1:] = 0.5j * dR * o
    ab[1] = 1.0 + 0.5j * dR * d
    ab[2, :-1] = 0.5j * dR * o
    rhs[0] = rhs[-1] = 0.0
    ab[1, 0] = ab[1, -1] = 1.0
    ab[0, 1] = ab[2, -2] = 0.0
    return 1.0 + linalg.solve_banded((1, 1), ab, rhs)


@dataclass(frozen=True)
class DiracField:
    psi: ComplexField2D
    rho: ComplexField2D


def dirac_evolve(pot: EffectivePotential, r=None, R_out=None, dR=None,
                 n_out: int = 201) -> DiracField:
    """Two-component first-order model for (symmetric, antisymmetric) amplitudes.

    i d/dR (psi, rho) = [[V, -i d/dr], [-i d/dr, -2m]] (psi, rho), with V and m
    following the density profile.  The derivative coupling is applied
    exactly in Fourier space, the diagonal phases by Strang splitting.
    Starts from psi = 1, rho = 0.
    """
    if R_out is None:
        R_out = (_default_R_out(pot, n_out) if pot.profile == "uniform"
                 else np.linspace(-5.0 * pot.sigma, 5.0 * pot.sigma, n_out))
    R_out = np.asarray(R_out, dtype=float)
    span = float(R_out[-1] - R_out[0])
    r = default_r_grid(pot, span) if r is None else r
    r, h = _check_r_grid(pot, r)
    dR = span / 4000.0 if dR is None else dR
    R_out, steps = _R_schedule(R_out, dR)

    k = 2 * np.pi * np.fft.fftfreq(r.size, d=h)
    V = pot.V(r, h)
    psi = np.ones(r.size, dtype=complex)
    rho = np.zeros(r.size, dtype=complex)
    out_psi = np.empty((r.size, R_out.size), dtype=complex)
    out_rho = np.empty_like(out_psi)
    out_psi[:, 0], out_rho[:, 0] = psi, rho
    for col, (R0, step, n) in enumerate(steps, start=1):
        cos_k, sin_k = np.cos(k * step), np.sin(k * step)
        for s in range(n):
            f = float(pot.profile_factor(R0 + (s + 0.5) * step))
            hv = np.exp(-0.5j * step * f * V)
            hm = np.exp(1j * step * pot.m * f)  # half of exp(2 i m dR)
            psi, rho = hv * psi, hm * rho
            a, b = np.fft.fft(psi), np.fft.fft(rho)
            a, b = cos_k * a - 1j * sin_k * b, cos_k * b - 1j * sin_k * a
            psi, rho = np.fft.ifft(a), np.fft.ifft(b)
            psi, rho = hv * psi, hm * rho
        out_psi[:, col], out_rho[:, col] = psi, rho
    meta = {"model": "dirac", "dR": dR, "h": h}
    return DiracField(ComplexField2D(r, R_out, out_psi, "r", "R", meta=meta),
                      ComplexField2D(r, R_out, out_rho, "r", "R", meta=meta))


# ------------------------------------------------------ delta-well analytics

def _scaled(lam, m, r_b, r, R):
    E2 = -lam ** 2 / (2.0 * m * r_b ** 2)
    r, R = np.broadcast_arrays(np.asarray(r, float), np.asarray(R, float))
    return E2 * R, lam * np.abs(r) / r_b, E2


def _ray(fun, start, direction):
    val, _ = integrate.quad(lambda t: fun(start + t * direction) * direction, 0.0, np.inf,
                            complex_func=True, limit=400, epsabs=1e-13, epsrel=1e-11)
    return val


def continuum_integral(alpha: float, z: float) -> complex:
    """int_0^inf [sin(s z) - s cos(s z)] / (s (s^2 + 1)) exp(i alpha s^2) ds.

    The head [0, S] is integrated on the real axis.  Beyond S the integrand
    is split into exp(+i s z) and exp(-i s z) parts, each rotated onto a
    ray along which it decays, with S past the stationary point z/(2 alpha).
    When alpha and z are both below about 1e-5 the rays decay too slowly
    for the quadrature and the absolute error grows to order z.
    """
    if alpha < 0:
        return np.conj(continuum_integral(-alpha, z))
    S = 2.0 if alpha == 0 else max(2.0, z / (2.0 * alpha) + 1.0)

    def head(s):
        return (z * np.sinc(s * z / np.pi) - np.cos(s * z)) / (s * s + 1.0) * np.exp(1j * alpha * s * s)

    n_osc = alpha * S * S + z * S
    pts = np.linspace(0.0, S, int(min(200, 4 + n_osc)) + 1)
    total = 0j
    for a, b in zip(pts[:-1], pts[1:]):
        v, _ = integrate.quad(head, a, b, complex_func=True, limit=200,
                              epsabs=1e-14, epsrel=1e-12)
        total += v

    def g_plus(s):
        return (1 / (2j * s) - 0.5) / (s * s + 1) * np.exp(1j * (alpha * s * s + s * z))

    def g_minus(s):
        return (-1 / (2j * s) - 0.5) / (s * s + 1) * np.exp(1j * (alpha * s * s - s * z))

    up, down = np.exp(0.25j * np.pi), np.exp(-0.25j * np.pi)
    if alpha == 0 and z == 0:
        return total - (0.5 * np.pi - math.atan(S))
    total += _ray(g_plus, S, up)
    total += _ray(g_minus, S, up if alpha > 0 else down)
    return total


def delta_potential_solution(lam, m, r_b, r, R) -> np.ndarray:
    """Bound-plus-continuum expansion of psi(r, R) for the delta well, by quadrature."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    alpha, z, _ = _scaled(lam, m, r_b, r, R)
    out = np.empty(alpha.shape, dtype=complex)
    for idx in np.ndindex(alpha.shape):
        a, zz = float(alpha[idx]), float(z[idx])
        out[idx] = 2 * np.exp(-1j * a - zz) + (2 / np.pi) * continuum_integral(a, zz)
    return out


@dataclass(frozen=True)
class AnalyticEvaluation:
    """Closed-form value with an estimate of the size of the neglected terms."""

    psi: np.ndarray
    dropped: np.ndarray


def erfi_closed_form(lam, m, r_b, r, R) -> AnalyticEvaluation:
    """Small-wavevector closed form of the delta-well solution (complex erfi)."""
    alpha, z, _ = _scaled(lam, m, r_b, r, R)
    if np.any(alpha == 0):
        raise ZeroDivisionError("the erfi form is singular at R = 0")
    y = np.sqrt(-1j * z ** 2 / (4 * alpha))
    psi = (2 * np.exp(-1j * alpha - z) + 1j * special.erfi(y)
           - np.sqrt(1j / (np.pi * alpha)) * np.exp(-1j * z ** 2 / (4 * alpha)))
    return AnalyticEvaluation(psi, 1.0 / (2.0 * np.abs(alpha)))


def taylor_form(lam, m, r_b, r, R) -> AnalyticEvaluation:
    """Erfi form with erfi(y) ~ 2y/sqrt(pi): bound term minus a fixed-phase continuum."""
    alpha, z, _ = _scaled(lam, m, r_b, r, R)
    if np.any(alpha == 0):
        raise ZeroDivisionError("the Taylor form is singular at R = 0")
    psi = 2 * np.exp(-1j * alpha - z) - np.sqrt(1j / (np.pi * alpha)) * (1 - z)
    y2 = z ** 2 / (4 * np.abs(alpha))
    return AnalyticEvaluation(psi, y2 / 3.0 + 1.0 / (2.0 * np.abs(alpha)))


def delta_z_coefficient() -> complex:
    return 2 * Z0 / math.pi * np.sqrt(1j / 3)


def delta_R_coefficient() -> complex:
    return 2 * (Z0 - 1) / math.pi ** 2 * np.sqrt(1j / 3) * (1j * math.pi - 2.0 / 3.0)


@dataclass(frozen=True)
class AnalyticVortices:
    k: np.ndarray
    R: np.ndarray
    r: float
    E2: float
    z0: float = Z0
    delta_z: complex = field(default_factory=delta_z_coefficient)
    delta_R: complex = field(default_factory=delta_R_coefficient)

    def points(self):
        """(R, r, sign) for every vortex of the pairs, sign marking the r side."""
        return [(R, s * self.r, s) for R in self.R for s in (1, -1)]


def vortex_positions_analytic(lam, m, r_b, k_max: int = 3, E2=None) -> AnalyticVortices:
    """Pair positions E2 R_k = 3pi/4 + 2pi k, lambda |r| / r_b = z0.

    ``E2`` may be passed from a numerical bound-state solve when lambda is
    not small; by default the delta-well value is used.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    E2 = -lam ** 2 / (2.0 * m * r_b ** 2) if E2 is None else E2
    k = np.arange(k_max + 1)
    R = (FIRST_VORTEX_PHASE + 2 * np.pi * k) / E2
    return AnalyticVortices(k=k, R=R, r=Z0 * r_b / lam, E2=float(E2))


# ------------------------------------------------------------- bound states

class NoBoundStateError(ValueError):
    pass


@dataclass(frozen=True)
class BoundState:
    """Most localised eigenstate of the negative-mass Hamiltonian.

    ``psi`` has unit L2 norm and is positive at r = 0.  ``component`` is
    the bound part of the initial condition psi = 1, i.e. (int psi) psi; its
    value at the origin is 2 for the delta well.
    """

    E2: float
    r: np.ndarray
    psi: np.ndarray
    component: np.ndarray
    decay_length: float

    @property
    def prefactor(self) -> float:
        return float(self.component[self.r.size // 2])


def bound_state_solve(pot: EffectivePotential, r=None) -> BoundState:
    """Highest eigenvalue of -(1/2m) d^2/dr^2 + V on a finite-difference grid."""
    if not pot.m * pot.U < 0:
        raise ValueError("needs an attractive configuration (m U < 0)")
    if r is None:
        lam = pot.lam
        half = pot.r_b * max(12.0, 12.0 / lam)
        h = pot.r_b / 40.0
        if pot.shape == "square":
            h = min(h, pot.well_width / 10.0)
        n = int(math.ceil(half / h))
        r = h * np.arange(-n, n + 1, dtype=float)
    r = np.asarray(r, dtype=float)
    h = float(r[1] - r[0])
    kin = -1.0 / (2.0 * pot.m * h * h)
    diag = -2.0 * kin + pot.V(r, h)
    off = np.full(r.size - 1, kin)
    sign = 1.0 if pot.U > 0 else -1.0
    # bound state is the top of the spectrum for U > 0 (negative mass)
    w, v = linalg.eigh_tridiagonal(sign * diag, sign * off, select="i",
                                   select_range=(r.size - 1, r.size - 1))
    E2 = float(sign * w[0])
    psi = v[:, 0] / math.sqrt(h)
    if psi[r.size // 2] < 0:
        psi = -psi
    if sign * E2 <= 0:
        raise NoBoundStateError("no bound state above the continuum edge on this grid")
    decay = 1.0 / math.sqrt(2.0 * abs(pot.m) * abs(E2))
    if decay > (r[-1] - r[0]) / 6.0:
        raise NoBoundStateError(
            f"bound state not resolved: decay length {decay:.3g} exceeds a sixth of the "
            f"domain ({r[-1] - r[0]:.3g}); lambda = {pot.lam:.3g} is below what this grid binds")
    c = float(np.sum(psi) * h)
    return BoundState(E2=E2, r=r, psi=psi, component=c * psi, decay_length=decay)


def calibrated_delta_well(pot: EffectivePotential, r, width: float | None = None,
                          tol: float = 1e-10) -> EffectivePotential:
    """Square-well surrogate whose bound-state energy on grid ``r`` equals E2_delta.

    A well of finite width w holding the delta weight binds slightly less
    strongly (relative shift of order lambda w / r_b); rescaling the depth
    removes that shift so the surrogate reproduces the delta-well phase
    exp(-i E2 R) over long propagation distances.
    """
    target = pot.E2_delta

    def mismatch(scale):
        return bound_state_solve(pot.delta_well(width, scale), r).E2 - target

    scale = optimize.brentq(mismatch, 0.5, 2.0, xtol=tol)
    return pot.delta_well(width, scale)


# ------------------------------------------------------------ phase diagram

def analytic_phase_boundary(lam):
    """Minimal phi from the two analytic limits: phi0/lambda (weak) and phi0 (strong)."""
    lam = np.asarray(lam, dtype=float)
    return PHI0 / lam, np.full_like(lam, PHI0)


def bound_energy_threshold(lam, E2_rb: float | None = None):
    """Minimal phi from |E2| L = 3pi/4 in the uniform model (U r_b = 2 sqrt(lambda)).

    ``E2_rb`` is E2 * r_b; by default the delta-well value 2 lambda^(3/2).
    """
    lam = float(lam)
    E2_rb = 2.0 * lam ** 1.5 if E2_rb is None else E2_rb
    return FIRST_VORTEX_PHASE * math.sqrt(lam) / E2_rb


def first_vortex_R(field: ComplexField2D, r_window: float) -> float:
    """Smallest R of any phase singularity with |r| <= r_window, or nan."""
    vs = find_vortices(field).within((-r_window, r_window), (-np.inf, np.inf))
    if len(vs) == 0:
        return math.nan
    return float(np.min(vs.positions[:, 1]))


@dataclass(frozen=True)
class PhaseDiagram:
    lam: np.ndarray
    phi: np.ndarray
    vortex: np.ndarray
    first_R_over_L: np.ndarray
    threshold_phi: np.ndarray
    model: str

    def rows(self):
        out = []
        for i, lam in enumerate(self.lam):
            for j, phi in enumerate(self.phi):
                out.append((lam, phi / np.pi, bool(self.vortex[i, j]), self.first_R_over_L[i, j]))
        return out


def uniform_threshold(lam: float, phi_max: float, n_out: int = 801,
                      points_per_rb: float = 10.0) -> float:
    """Smallest phi <= phi_max for which the uniform model holds a vortex, or nan.

    One run to the length of ``phi_max`` suffices: a shorter medium is the
    same evolution stopped earlier, so the threshold is sqrt(lambda) R_first / r_b.
    """
    pot = EffectivePotential.from_lambda_phi(lam, phi_max)
    r = default_r_grid(pot, pot.L, points_per_rb)
    fld = schrodinger_evolve(pot, r=r, R_out=np.linspace(0.0, pot.L, n_out))
    window = min(0.5 * r[-1], pot.r_b * (3.0 * Z0 / lam + 6.0))
    R1 = first_vortex_R(fld, window)
    return R1 * 0.5 * pot.U if np.isfinite(R1) else math.nan


def phase_diagram(lams, phis, model: str = "uniform-schrodinger", base_params=None,
                  grid=None) -> PhaseDiagram:
    """Vortex / no-vortex map over (lambda, phi)."""
    lams = np.asarray(lams, dtype=float)
    phis = np.asarray(phis, dtype=float)
    if model == "uniform-schrodinger":
        thr = np.array([uniform_threshold(l, float(phis.max())) for l in lams])
        vortex = phis[None, :] >= thr[:, None]
        with np.errstate(invalid="ignore"):
            frac = np.where(vortex, thr[:, None] / phis[None, :], np.nan)
        return PhaseDiagram(lams, phis, vortex, frac, thr, model)
    if model == "gaussian-full":
        return _gaussian_full_diagram(lams, phis, base_params, grid)
    raise ValueError("model must be 'uniform-schrodinger' or 'gaussian-full'")


def physical_for(lam: float, phi: float, base):
    """Physical parameters hitting (lambda, phi) by adjusting OD and C6 of ``base``."""
    from rydvortex.params import enhancement_q0
    from rydvortex.single_photon import mass_from_susceptibility

    q0 = enhancement_q0(base.Omega, base.Delta, base.delta)
    q = mass_from_susceptibility(base).q
    OD = 2.0 * phi * base.Delta / (q * base.Gamma)
    OD_b = 2.0 * base.Delta * math.sqrt(lam) / (q0 * base.Gamma)
    r_b = OD_b * base.L / OD
    C6 = math.copysign(2.0 * r_b ** 6 * base.eit_linewidth / q0, base.C6_over_hbar or -1.0)
    return base.replace(OD=OD, C6_over_hbar=C6)


def _gaussian_full_diagram(lams, phis, base, grid):
    from rydvortex.params import PhysicalParams, derive_params
    from rydvortex.two_photon import GridSpec, solve_steady_state

    base = PhysicalParams() if base is None else base
    vortex = np.zeros((lams.size, phis.size), dtype=bool)
    frac = np.full((lams.size, phis.size), np.nan)
    for i, lam in enumerate(lams):
        for j, phi in enumerate(phis):
            p = physical_for(lam, phi, base)
            r_b = derive_params(p).r_b
            g = grid or GridSpec()
            h_needed = min(p.sigma / 20.0, r_b / 10.0)
            n = max(g.n, int(math.ceil(2 * g.half_width * p.sigma / h_needed)) + 1)
            a = solve_steady_state(p, replace(g, n=n))
            vs = find_vortices(a.normalized("EE"), a.x1, a.x2)
            if len(vs):
                vortex[i, j] = True
                R = 0.5 * vs.positions.sum(axis=1)
                frac[i, j] = (float(R.min()) + 0.5 * p.L) / p.L
    thr = np.array([phis[np.argmax(row)] if row.any() else np.nan for row in vortex])
    return PhaseDiagram(lams, phis, vortex, frac, thr, "gaussian-full")


# ------------------------------------------------------------ cross checks

@dataclass(frozen=True)
class DeltaCrossCheck:
    """Relative RMS differences between three evaluations of the delta-well psi."""

    lam: float
    window: tuple  # (E2 R) range
    numeric_vs_quadrature: float
    erfi_vs_quadrature: float
    erfi_vs_numeric: float
    r_points: int


def _rel_rms(d, ref):
    return float(np.sqrt(np.mean(np.abs(d) ** 2) / np.mean(np.abs(ref) ** 2)))


def delta_crosscheck(lam: float, window, n_R: int = 9, z_max: float = 4.0, n_z: int = 9,
                     dR: float = 0.02) -> DeltaCrossCheck:
    """Narrow-well numerics, expansion quadrature and the erfi form on a (z, E2 R) grid.

    Lengths in units of r_b.  The numerical side is Crank-Nicolson on the
    depth-calibrated square-well surrogate.
    """
    base = EffectivePotential.from_lambda_phi(lam, 1.0)
    E2 = base.E2_delta
    Rs = np.linspace(window[0], window[1], n_R) / E2
    r = default_r_grid(base.delta_well(), Rs[-1])
    pot = calibrated_delta_well(base, r)
    fld = schrodinger_evolve(pot, r=r, R_out=np.concatenate([[0.0], Rs]), dR=dR,
                             method="crank-nicolson")
    zs = np.linspace(0.0, z_max, n_z)
    idx = [int(np.argmin(np.abs(r - z / lam))) for z in zs]
    num = fld.values[idx][:, 1:]
    rr, RR = np.meshgrid(r[idx], Rs, indexing="ij")
    quad = delta_potential_solution(lam, base.m, base.r_b, rr, RR)
    erfi = erfi_closed_form(lam, base.m, base.r_b, rr, RR).psi
    return DeltaCrossCheck(lam, (float(window[0]), float(window[1])), _rel_rms(num - quad, quad),
                           _rel_rms(erfi - quad, quad), _rel_rms(erfi - num, num), r.size)


def dirac_schrodinger_rms(lam: float, phi: float, points_per_rb: float = 8.0,
                          n_out: int = 101, steps: int = 3000) -> float:
    """Relative RMS of psi_Dirac - psi_Schrodinger for the uniform medium.

    Compared over the whole medium and |r| within the first vortex radius
    plus 2 r_b.
    """
    pot = EffectivePotential.from_lambda_phi(lam, phi)
    r = default_r_grid(pot, pot.L, points_per_rb)
    R = np.linspace(0.0, pot.L, n_out)
    S = schrodinger_evolve(pot, r=r, R_out=R, dR=pot.L / steps).values
    D = dirac_evolve(pot, r=r, R_out=R, dR=pot.L / steps).psi.values
    w = np.abs(r) <= pot.r_b * (3.0 * Z0 / lam + 2.0)
    return _rel_rms(D[w] - S[w], S[w])


def dirac_vortices(p, R_stop_sigma: float = 3.0, n_out: int = 301, box_sigma: float = 5.0):
    """Vortices of the Gaussian-cloud Dirac field inside the (x1, x2) box.

    The field is read up to R = R_stop_sigma * sigma, where the density
    (and with it the mass and potential) has fallen to
    exp(-R_stop_sigma^2 / 2) of its peak; beyond that the first-order model
    turns massless and no longer describes photons that have left the cloud.
    """
    pot = EffectivePotential.from_params(p, profile="gaussian")
    R = np.linspace(-box_sigma * p.sigma, R_stop_sigma * p.sigma, n_out)
    f = dirac_evolve(pot, R_out=R).psi
    lim = box_sigma * p.sigma
    keep = tuple(v for v in find_vortices(f)
                 if abs(v.y + 0.5 * v.x) <= lim and abs(v.y - 0.5 * v.x) <= lim)
    return keep


def dirac_vortex_onset(base, od_lo: float, od_hi: float, tol: float = 0.5,
                       R_stop_sigma: float = 3.0) -> float:
    """Smallest OD (to ``tol``) at which the Dirac field holds a vortex, by bisection."""
    if dirac_vortices(base.replace(OD=od_lo), R_stop_sigma):
        raise ValueError("vortex already present at the lower OD")
    if not dirac_vortices(base.replace(OD=od_hi), R_stop_sigma):
        raise ValueError("no vortex at the upper OD")
    lo, hi = od_lo, od_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if dirac_vortices(base.replace(OD=mid), R_stop_sigma):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)

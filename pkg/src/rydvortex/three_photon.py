"""Three photons in the stationary frame: Jacobi coordinates and a bound-state ansatz.

Stationarity removes the centre of time, leaving the plane of

    eta = t21 / sqrt(2),   zeta = (t13 + t23) / sqrt(6),

on which the six permutations of the photons act as reflections and
rotations by 120 degrees.  The interaction "time" R (centre-of-mass
coordinate inside the medium) is the third axis of the phase structure.

The ansatz superposes a three-body bound state, the pair bound states and
a scattering remainder that makes psi = 1 at R = 0:

    psi = e^{-i E3 R} B3 + e^{-i E2 R} B2 + (1 - B3 - B2)

with B2 = sum over pairs of 2 exp(-|t_ij|/a) and B3 a product of the
confined pair factors, normalised at the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import permutations

import numpy as np
from scipy import interpolate

from rydvortex.fields import ComplexField2D
from rydvortex.topology import unwrap_phase_2d, vortex_lines_3d, wrap

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)
SQ6 = math.sqrt(6.0)


@dataclass(frozen=True)
class JacobiPoint:
    eta: np.ndarray
    zeta: np.ndarray


def jacobi_forward(t1, t2, t3) -> JacobiPoint:
    t1, t2, t3 = (np.asarray(t, dtype=float) for t in (t1, t2, t3))
    return JacobiPoint((t2 - t1) / SQ2, ((t1 - t3) + (t2 - t3)) / SQ6)


def jacobi_inverse(eta, zeta, center=0.0):
    """Times (t1, t2, t3) with mean ``center`` that map to (eta, zeta)."""
    eta = np.asarray(eta, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    t1 = center + zeta / SQ6 - eta / SQ2
    t2 = center + zeta / SQ6 + eta / SQ2
    t3 = center - 2.0 * zeta / SQ6
    return t1, t2, t3


def pair_separations(eta, zeta):
    """Signed (t21, t13, t23)."""
    eta = np.asarray(eta, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    return SQ2 * eta, (SQ3 * zeta - eta) / SQ2, (SQ3 * zeta + eta) / SQ2


def _s3_matrices():
    mats = []
    for perm in permutations(range(3)):
        cols = []
        for basis in ((1.0, 0.0), (0.0, 1.0)):
            t = jacobi_inverse(*basis)
            q = jacobi_forward(*(t[k] for k in perm))
            cols.append((float(q.eta), float(q.zeta)))
        mats.append(np.array(cols).T)
    return tuple(mats)


#: The six linear maps of the (eta, zeta) plane induced by permuting photons.
S3_MATRICES = _s3_matrices()


def s3_orbit(eta, zeta):
    """The six images of (eta, zeta); the identity comes first."""
    eta = np.asarray(eta, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    return [(M[0, 0] * eta + M[0, 1] * zeta, M[1, 0] * eta + M[1, 1] * zeta)
            for M in S3_MATRICES]


@dataclass(frozen=True)
class ThreePhotonAnsatz:
    """Energies per unit R, scattering length ``a`` in the units of eta and zeta.

    ``amplitude3_at_origin`` is B3(0, 0); the default -18 equals -3 B2(0, 0)
    with the pair prefactor 2.  ``include_three_body=False`` drops B3 and
    leaves the pairwise-only field.
    """

    E2: float
    E3: float
    a: float
    amplitude3_at_origin: complex = -18.0
    pair_prefactor: float = 2.0
    include_three_body: bool = True

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a must be positive")

    @classmethod
    def from_lambda(cls, lam: float, r_b: float, U: float | None = None,
                    E3_ratio: float = 3.0, **kw) -> "ThreePhotonAnsatz":
        """Pair energy from the delta-well limit, E2 = lambda U with U = 2 sqrt(lambda)/r_b."""
        if U is None:
            U = 2.0 * math.sqrt(lam) / r_b
        E2 = lam * U
        return cls(E2=E2, E3=E3_ratio * E2, a=r_b / lam, **kw)

    def without_three_body(self) -> "ThreePhotonAnsatz":
        return replace(self, include_three_body=False)

    @property
    def E3_ratio(self) -> float:
        return self.E3 / self.E2

    def R_for_phase(self, alpha: float) -> float:
        """R at which the pair bound state has advanced by ``alpha``."""
        return alpha / self.E2

    def pair_bound(self, t):
        return self.pair_prefactor * np.exp(-np.abs(np.asarray(t, dtype=float)) / self.a)

    def pair_sum(self, eta, zeta):
        return sum(self.pair_bound(t) for t in pair_separations(eta, zeta))

    def three_body(self, eta, zeta):
        if not self.include_three_body:
            return np.zeros(np.broadcast(np.asarray(eta), np.asarray(zeta)).shape)
        s = sum(np.abs(t) for t in pair_separations(eta, zeta))
        return self.amplitude3_at_origin * np.exp(-s / self.a)

    def psi(self, eta, zeta, R):
        eta, zeta, R = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (eta, zeta, R)))
        b2 = self.pair_sum(eta, zeta)
        b3 = self.three_body(eta, zeta)
        return (np.exp(-1j * self.E3 * R) * b3 + np.exp(-1j * self.E2 * R) * b2
                + (1.0 - b3 - b2))

    def pair_psi(self, t, R):
        """Matching two-photon ansatz: e^{-i E2 R} B + (1 - B)."""
        b = self.pair_bound(t)
        return 1.0 + b * (np.exp(-1j * self.E2 * np.asarray(R, dtype=float)) - 1.0)

    def pair_g2(self, t, R):
        return np.abs(self.pair_psi(t, R)) ** 2


def ansatz_psi3(cfg: ThreePhotonAnsatz, eta, zeta, R):
    return cfg.psi(eta, zeta, R)


@dataclass(frozen=True)
class ThreePhotonSlice:
    """phi3 (wrapped) and g3 = |psi|^2 on an (eta, zeta) grid at fixed R."""

    field: ComplexField2D
    R: float

    @property
    def phi3(self):
        return wrap(np.angle(self.field.values))

    @property
    def g3(self):
        return self.field.abs2


def _grid(eta, zeta):
    eta = np.asarray(eta, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    return np.meshgrid(eta, zeta, indexing="ij")


def phi3_and_g3(cfg: ThreePhotonAnsatz, eta, zeta, R: float,
                check_resolution: bool = True) -> ThreePhotonSlice:
    eta = np.asarray(eta, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    if check_resolution:
        h = max(np.max(np.abs(np.diff(eta))), np.max(np.abs(np.diff(zeta))))
        if h > cfg.a / 10 * (1 + 1e-9):
            raise ValueError(f"grid step {h:g} exceeds a/10 = {cfg.a / 10:g}")
    E, Z = _grid(eta, zeta)
    f = ComplexField2D(eta, zeta, cfg.psi(E, Z, R), "eta", "zeta", {"R": float(R)})
    return ThreePhotonSlice(f, float(R))


def ansatz_volume(cfg: ThreePhotonAnsatz, eta, zeta, R) -> np.ndarray:
    """psi on the full (eta, zeta, R) grid."""
    E, Z, RR = np.meshgrid(np.asarray(eta, float), np.asarray(zeta, float),
                           np.asarray(R, float), indexing="ij")
    return cfg.psi(E, Z, RR)


# --------------------------------------------------------------------------
# pair-correlation based fields

def _curve_arrays(curve, name):
    """(|t| samples, values) from an ObservableCurve or an explicit pair of arrays."""
    if hasattr(curve, "tau"):
        return np.asarray(curve.tau, float), np.asarray(getattr(curve, name), float)
    t, y = curve
    return np.asarray(t, float), np.asarray(y, float)


def _lookup(t_samples, y, t, far):
    """Interpolate y(|t|), returning ``far`` beyond the sampled range."""
    order = np.argsort(t_samples)
    ts, ys = t_samples[order], y[order]
    ta = np.abs(np.asarray(t, dtype=float))
    out = np.interp(ta, ts, ys)
    return np.where(ta > ts[-1], far, out)


def disconnected_g3(g2_curve, eta, zeta):
    """g3_d = g2(t21) + g2(t13) + g2(t32) - 2 from a g2(tau) curve.

    ``g2_curve`` is an ObservableCurve or a tuple (tau, g2).  Beyond the
    sampled delays the photons are taken as uncorrelated, g2 = 1.
    """
    ts, g = _curve_arrays(g2_curve, "g2")
    return sum(_lookup(ts, g, t, 1.0) for t in pair_separations(eta, zeta)) - 2.0


def ansatz_disconnected_g3(cfg: ThreePhotonAnsatz, eta, zeta, R):
    """g3_d built from the matching two-photon ansatz at the same R."""
    return sum(cfg.pair_g2(t, R) for t in pair_separations(eta, zeta)) - 2.0


def connected_g3(cfg: ThreePhotonAnsatz, eta, zeta, R):
    """g3_c = |psi|^2 - g3_d for the ansatz and its own pair correlations."""
    return np.abs(cfg.psi(eta, zeta, R)) ** 2 - ansatz_disconnected_g3(cfg, eta, zeta, R)


def pairwise_extrapolation_psi3(g2_curve, phi2_curve=None, eta=0.0, zeta=0.0):
    """Psi(t21) + Psi(t13) + Psi(t32) - 2 with Psi = sqrt(g2) exp(i phi2).

    ``phi2_curve`` defaults to the phase stored in ``g2_curve``.  Outside the
    sampled delays Psi = 1.
    """
    ts, g = _curve_arrays(g2_curve, "g2")
    if phi2_curve is None:
        phi2_curve = g2_curve
    tp, ph = _curve_arrays(phi2_curve, "phi2_unwrapped")
    out = -2.0 + 0j
    for t in pair_separations(eta, zeta):
        amp = np.sqrt(np.clip(_lookup(ts, g, t, 1.0), 0.0, None))
        out = out + amp * np.exp(1j * _lookup(tp, ph, t, 0.0))
    return out


# --------------------------------------------------------------------------
# six-fold symmetry

def sixfold_symmetrize(f, eta=None, zeta=None):
    """Average of the six S3 images of a field.

    ``f`` may be a callable f(eta, zeta), giving an exactly symmetric
    callable, or a ComplexField2D / array sampled on (eta, zeta), which is
    resampled by linear interpolation.  Images that fall outside the grid
    are left out of the average for that point.
    """
    if callable(f):
        def sym(e, z):
            return sum(f(a, b) for a, b in s3_orbit(e, z)) / 6.0
        return sym
    if isinstance(f, ComplexField2D):
        eta, zeta, vals = f.x, f.y, f.values
    else:
        vals = np.asarray(f)
    eta = np.asarray(eta, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    E, Z = _grid(eta, zeta)
    interp = interpolate.RegularGridInterpolator((eta, zeta), vals, bounds_error=False,
                                                 fill_value=np.nan)
    acc = np.zeros(vals.shape, dtype=np.result_type(vals.dtype, float))
    cnt = np.zeros(vals.shape)
    for a, b in s3_orbit(E, Z):
        v = interp(np.stack([a, b], axis=-1))
        ok = ~np.isnan(v)
        acc[ok] += v[ok]
        cnt += ok
    out = acc / np.maximum(cnt, 1)
    if isinstance(f, ComplexField2D):
        return ComplexField2D(eta, zeta, out.astype(complex), f.x_name, f.y_name, dict(f.meta))
    return out


# --------------------------------------------------------------------------
# phase structure

def central_phase(cfg: ThreePhotonAnsatz, R_max: float, n: int = 2001):
    """arg psi(0, 0, R), unwrapped continuously from R = 0 (where it is 0)."""
    R = np.linspace(0.0, R_max, n)
    return R, np.unwrap(np.angle(cfg.psi(0.0, 0.0, R)))


def unwrapped_plane_phase(cfg: ThreePhotonAnsatz, eta, zeta, R: float) -> np.ndarray:
    """Phase on the (eta, zeta) grid unwrapped from the far-field corner."""
    s = phi3_and_g3(cfg, eta, zeta, R, check_resolution=False)
    return unwrap_phase_2d(s.field, anchor=(0, 0))


@dataclass(frozen=True)
class PhaseTopology:
    """Vortex lines of psi in an (eta, zeta, R) box."""

    lines: list
    rings: list
    R_axis: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n_lines(self):
        return len(self.lines)

    @property
    def n_rings(self):
        return len(self.rings)

    def first_R(self, which: str) -> float:
        group = self.lines if which == "lines" else self.rings
        if not group:
            return math.nan
        return float(min(ln.centers[:, 2].min() for ln in group))


def phase_topology(cfg: ThreePhotonAnsatz, eta, zeta, R, min_cells: int = 3) -> PhaseTopology:
    """Open vortex lines and closed rings of the ansatz in the given box.

    Components threading fewer than ``min_cells`` cells are discarded as
    grid noise.
    """
    vol = ansatz_volume(cfg, eta, zeta, R)
    comps = [c for c in vortex_lines_3d(vol, (eta, zeta, R)) if len(c.cells) >= min_cells]
    lines = [c for c in comps if not c.closed]
    rings = [c for c in comps if c.closed]
    return PhaseTopology(lines, rings, np.asarray(R, float),
                         {"E3_over_E2": cfg.E3_ratio, "three_body": cfg.include_three_body})


def cylinder_punctures(cfg: ThreePhotonAnsatz, radius: float, R, n_theta: int = 720):
    """Vortices on the cylinder |(eta, zeta)| = radius, in (theta, R) coordinates.

    Lines leaving the centre cross this surface once per end.
    """
    from rydvortex.topology import find_vortices

    theta = np.linspace(-math.pi, math.pi, n_theta + 1)
    R = np.asarray(R, dtype=float)
    T, RR = np.meshgrid(theta, R, indexing="ij")
    f = ComplexField2D(theta, R, cfg.psi(radius * np.cos(T), radius * np.sin(T), RR),
                       "theta", "R")
    return find_vortices(f)


def ring_cross_section(cfg: ThreePhotonAnsatz, eta, R, zeta: float = 0.0):
    """Vortices of psi in the (eta, R) plane at fixed zeta."""
    from rydvortex.topology import find_vortices

    eta = np.asarray(eta, dtype=float)
    R = np.asarray(R, dtype=float)
    E, RR = np.meshgrid(eta, R, indexing="ij")
    return find_vortices(ComplexField2D(eta, R, cfg.psi(E, zeta, RR), "eta", "R"))


# --------------------------------------------------------------------------
# time <-> length

def group_velocity(p, rel_step: float = 1e-4) -> float:
    """Mean slow-light velocity through the cloud (um/us).

    The delay is d arg(E_out)/d delta at two-photon resonance, and the
    effective length of the Gaussian cloud is sqrt(2 pi) sigma.
    """
    from rydvortex.single_photon import output_field

    h = rel_step * max(p.eit_linewidth, 1e-12)
    ph = np.angle(output_field(p, np.array([p.delta - h, p.delta + h])))
    tau = float(wrap(ph[1] - ph[0])) / (2 * h)
    length = math.sqrt(2 * math.pi) * p.sigma
    return length / (tau + length / p.c)


def to_time(x, v_g: float):
    """Length coordinate -> delay, tau = x / v_g."""
    return np.asarray(x, dtype=float) / v_g


def to_length(tau, v_g: float):
    return np.asarray(tau, dtype=float) * v_g

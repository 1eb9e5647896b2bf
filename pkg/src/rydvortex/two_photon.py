"""Steady state of the nine coupled two-photon amplitudes.

The solver works with amplitudes divided by the single-photon product
E(x1) E(x2) and with atomic excitations rescaled by 1/sqrt(c) each, so
every unknown is of order one.  In these variables the uncorrelated
solution is a constant along the transport directions and is reproduced
exactly by any difference stencil; only the photon-photon interaction
generates discretisation error.

Transport equations (EE, EP, PE, ES, SE) are divided by c: the terms that
describe atomic dynamics at the coordinate *not* being transported then
carry a factor 1/c.  They are kept, not dropped.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from rydvortex.params import PhysicalParams
from rydvortex.single_photon import (
    SinglePhotonState,
    propagation_rate,
    reduced_atomic_ratios,
    reduced_coupling,
    steady_state,
)

AMPLITUDES = ("EE", "EP", "PE", "ES", "SE", "PP", "PS", "SP", "SS")
_IDX = {name: k for k, name in enumerate(AMPLITUDES)}
# number of atomic excitations carried by each amplitude
_ATOMIC_ORDER = {"EE": 0, "EP": 1, "PE": 1, "ES": 1, "SE": 1,
                 "PP": 2, "PS": 2, "SP": 2, "SS": 2}
_TRANSPORT_AXIS = {"EP": 0, "ES": 0, "PE": 1, "SE": 1}


@dataclass(frozen=True)
class GridSpec:
    """Square grid over [-half_width, half_width]^2 in units of sigma."""

    n: int = 601
    half_width: float = 5.0
    order: int = 2
    v_cap_factor: float = 1e6

    def __post_init__(self):
        if self.n < 5:
            raise ValueError("grid needs at least 5 points per axis")
        if self.order not in (1, 2):
            raise ValueError("upwind order must be 1 or 2")

    def axis(self, p: PhysicalParams) -> np.ndarray:
        w = self.half_width * p.sigma
        return np.linspace(-w, w, self.n)

    def scaled(self, factor: float) -> "GridSpec":
        n = int(round((self.n - 1) * factor)) + 1
        return GridSpec(n=n, half_width=self.half_width, order=self.order,
                        v_cap_factor=self.v_cap_factor)


def vdw_potential(p: PhysicalParams, r, cap=None):
    """V_ss(r) = -(C6/hbar)/|r|^6, clipped at ``cap`` in magnitude."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        v = -p.C6_over_hbar / r ** 6 if p.C6_over_hbar != 0 else np.zeros_like(r)
    if cap is not None:
        v = np.clip(v, -cap, cap)
    return v


@dataclass(frozen=True)
class AmplitudeGrid2:
    """Two-photon steady state on an (x1, x2) grid.

    ``reduced[k]`` holds amplitude ``AMPLITUDES[k]`` divided by
    E(x1) E(x2) and by sqrt(c) per atomic excitation.  Axis 0 is x1.
    """

    x1: np.ndarray
    x2: np.ndarray
    reduced: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    params: PhysicalParams
    grid: GridSpec
    meta: dict = field(default_factory=dict, compare=False)

    def normalized(self, name: str) -> np.ndarray:
        return self.reduced[_IDX[name]]

    def amplitude(self, name: str, physical: bool = False) -> np.ndarray:
        """Amplitude ``name`` on the grid.

        With ``physical=False`` atomic excitations stay divided by sqrt(c).
        """
        out = self.reduced[_IDX[name]] * np.outer(self.E1, self.E2)
        if physical:
            out = out * self.params.c ** (0.5 * _ATOMIC_ORDER[name])
        return out

    def __getattr__(self, name):
        if name in _IDX:
            return self.amplitude(name)
        raise AttributeError(name)

    @property
    def h(self) -> float:
        return float(self.x1[1] - self.x1[0])


@dataclass(frozen=True)
class NormalizedPsi:
    x1: np.ndarray
    x2: np.ndarray
    psi: np.ndarray


def _uncorrelated(p, x):
    a = reduced_coupling(p, x)
    pr, sr = reduced_atomic_ratios(p, a)
    return a, pr, sr


def _boundary_values(p, x):
    """Reduced amplitudes of two uncorrelated photons, shape (9, n, n)."""
    _, pr, sr = _uncorrelated(p, x)
    one = np.ones_like(pr)
    per_axis = {"E": one, "P": pr, "S": sr}
    out = np.empty((9, x.size, x.size), dtype=complex)
    for k, name in enumerate(AMPLITUDES):
        out[k] = np.outer(per_axis[name[0]], per_axis[name[1]])
    return out


def _stencil(u, axis, i, j, order, h):
    """Backward difference coefficient and known part at nodes (i, j).

    Returns ``alpha`` (scalar per node) and ``rest`` (shape (9, nodes)) with
    D u(i, j) = alpha * u(i, j) - rest.
    """
    idx = i if axis == 0 else j
    first = (idx == 1) | (order == 1)

    def at(offset):
        if axis == 0:
            return u[:, np.maximum(i - offset, 0), j]
        return u[:, i, np.maximum(j - offset, 0)]

    m1, m2 = at(1), at(2)
    alpha = np.where(first, 1.0 / h, 1.5 / h)
    rest = np.where(first, m1 / h, (4.0 * m1 - m2) / (2.0 * h))
    return alpha, rest


def solve_steady_state(p: PhysicalParams, grid: GridSpec = GridSpec()) -> AmplitudeGrid2:
    """Causal upwind sweep of the stationary two-photon equations.

    Nodes on one anti-diagonal depend only on the two previous
    anti-diagonals, so each anti-diagonal is one batched 9x9 solve.
    """
    x = grid.axis(p)
    n = x.size
    h = float(x[1] - x[0])
    max_h = min(p.sigma / 20.0, _blockade_scale(p) / 10.0)
    if h > max_h * (1 + 1e-9):
        raise ValueError(f"grid spacing {h:.3g} um exceeds limit {max_h:.3g} um")

    a, _, _ = _uncorrelated(p, x)
    k = propagation_rate(p, x)
    A = p.Gamma - 1j * p.Delta
    B = p.gamma - 1j * p.delta
    W = p.Omega
    inv_c = 1.0 / p.c
    cap = grid.v_cap_factor * p.eit_linewidth

    u = _boundary_values(p, x)
    for s in range(2, 2 * n - 1):
        i = np.arange(max(1, s - n + 1), min(s - 1, n - 1) + 1)
        if i.size == 0:
            continue
        j = s - i
        a1, a2, k1, k2 = a[i], a[j], k[i], k[j]
        V = vdw_potential(p, x[i] - x[j], cap)
        al1, r1 = _stencil(u, 0, i, j, grid.order, h)
        al2, r2 = _stencil(u, 1, i, j, grid.order, h)

        M = np.zeros((i.size, 9, 9), dtype=complex)
        rhs = np.zeros((i.size, 9), dtype=complex)
        EE, EP, PE, ES, SE, PP, PS, SP, SS = range(9)
        # EE: (d1 + d2) EE = (k1 + k2) EE + i (a1 PE + a2 EP)
        M[:, EE, EE] = al1 + al2 - k1 - k2
        M[:, EE, PE] = -1j * a1
        M[:, EE, EP] = -1j * a2
        rhs[:, EE] = r1[EE] + r2[EE]
        # EP: d1 EP = k1 EP + i a1 PP + (1/c)(-A EP + i a2 EE + i W ES)
        M[:, EP, EP] = al1 - k1 + inv_c * A
        M[:, EP, PP] = -1j * a1
        M[:, EP, EE] = -1j * inv_c * a2
        M[:, EP, ES] = -1j * inv_c * W
        rhs[:, EP] = r1[EP]
        M[:, PE, PE] = al2 - k2 + inv_c * A
        M[:, PE, PP] = -1j * a2
        M[:, PE, EE] = -1j * inv_c * a1
        M[:, PE, SE] = -1j * inv_c * W
        rhs[:, PE] = r2[PE]
        # ES: d1 ES = k1 ES + i a1 PS + (1/c)(-B ES + i W EP)
        M[:, ES, ES] = al1 - k1 + inv_c * B
        M[:, ES, PS] = -1j * a1
        M[:, ES, EP] = -1j * inv_c * W
        rhs[:, ES] = r1[ES]
        M[:, SE, SE] = al2 - k2 + inv_c * B
        M[:, SE, SP] = -1j * a2
        M[:, SE, PE] = -1j * inv_c * W
        rhs[:, SE] = r2[SE]
        # algebraic (no transport) amplitudes
        M[:, PP, PP] = 2 * A
        M[:, PP, EP] = -1j * a1
        M[:, PP, PE] = -1j * a2
        M[:, PP, PS] = -1j * W
        M[:, PP, SP] = -1j * W
        M[:, PS, PS] = A + B
        M[:, PS, ES] = -1j * a1
        M[:, PS, SS] = -1j * W
        M[:, PS, PP] = -1j * W
        M[:, SP, SP] = A + B
        M[:, SP, SE] = -1j * a2
        M[:, SP, SS] = -1j * W
        M[:, SP, PP] = -1j * W
        M[:, SS, SS] = 2 * B + 1j * V
        M[:, SS, PS] = -1j * W
        M[:, SS, SP] = -1j * W
        try:
            sol = np.linalg.solve(M, rhs[..., None])[..., 0]
        except np.linalg.LinAlgError as exc:  # pragma: no cover - bug guard
            raise ArithmeticError(f"singular node system on anti-diagonal {s}") from exc
        u[:, i, j] = sol.T

    single = steady_state(p, x)
    meta = {"h_um": h, "n": n, "order": grid.order, "v_cap": cap,
            "half_width_sigma": grid.half_width}
    return AmplitudeGrid2(x1=x, x2=x, reduced=u, E1=single.E, E2=single.E,
                          params=p, grid=grid, meta=meta)


def _blockade_scale(p: PhysicalParams) -> float:
    """Blockade radius with unit enhancement; only used for grid checks."""
    if p.C6_over_hbar == 0:
        return math.inf
    return (0.5 * abs(p.C6_over_hbar) / p.eit_linewidth) ** (1 / 6)


def normalize(a: AmplitudeGrid2, s: SinglePhotonState | None = None) -> NormalizedPsi:
    """psi(x1, x2) = EE(x1, x2) / (E(x1) E(x2))."""
    if s is None:
        return NormalizedPsi(a.x1, a.x2, a.normalized("EE").copy())
    if np.min(np.abs(s.E)) < 1e-30:
        raise ArithmeticError("single-photon field vanishes on the grid")
    if s.x.shape != a.x1.shape or not np.allclose(s.x, a.x1):
        raise ValueError("single-photon state must live on the solver grid")
    EE = a.amplitude("EE")
    return NormalizedPsi(a.x1, a.x2, EE / np.outer(s.E, s.E))


def exchange_asymmetry(a: AmplitudeGrid2) -> float:
    """Largest violation of bosonic exchange symmetry, relative to max |EE|."""
    u = a.reduced
    scale = np.max(np.abs(u[_IDX["EE"]]))
    worst = 0.0
    for left, right in (("EE", "EE"), ("EP", "PE"), ("ES", "SE"), ("PS", "SP"),
                        ("PP", "PP"), ("SS", "SS")):
        diff = np.abs(u[_IDX[left]] - u[_IDX[right]].T)
        ref = max(scale, np.max(np.abs(u[_IDX[left]])))
        worst = max(worst, float(np.max(diff) / ref))
    return worst


def params_header(a: AmplitudeGrid2) -> str:
    return json.dumps({"params_MHz_um": a.params.to_mhz_dict(), **a.meta}, sort_keys=True)

"""Physical constants, unit conventions and derived dimensionless quantities.

Internal units are micrometres and microseconds.  Every frequency is an
angular frequency in rad/us; a value quoted as ``f`` MHz is stored as
``2*pi*f``.  Use :meth:`PhysicalParams.from_mhz` to build parameters from
laboratory numbers.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi
SPEED_OF_LIGHT = 299_792_458.0  # um/us

#: Laboratory values of the vortex experiment, frequencies in MHz.
LAB_MHZ = {
    "Gamma": 3.03,
    "gamma": 0.07,
    "Omega": 9.5,
    "Delta": 28.5,
    "delta": 1.03,
    "C6_over_hbar": -5.617e7,
}
LAB_LENGTH_UM = 75.0

FREQUENCY_FIELDS = ("Gamma", "gamma", "Omega", "Delta", "delta", "C6_over_hbar")


def mhz(f):
    """Convert a frequency in MHz to rad/us."""
    return TWO_PI * f


@dataclass(frozen=True)
class PhysicalParams:
    """Atomic and optical constants (rad/us, um)."""

    Gamma: float = mhz(LAB_MHZ["Gamma"])
    gamma: float = mhz(LAB_MHZ["gamma"])
    Omega: float = mhz(LAB_MHZ["Omega"])
    Delta: float = mhz(LAB_MHZ["Delta"])
    delta: float = mhz(LAB_MHZ["delta"])
    C6_over_hbar: float = mhz(LAB_MHZ["C6_over_hbar"])
    OD: float = 110.0
    sigma: float = LAB_LENGTH_UM / math.sqrt(TWO_PI)
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not self.Gamma > 0:
            raise ValueError("Gamma must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if not self.Omega > 0:
            raise ValueError("Omega must be positive")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.OD < 0:
            raise ValueError("OD must be non-negative")
        if not self.c > 0:
            raise ValueError("c must be positive")

    @classmethod
    def from_mhz(cls, **kw) -> "PhysicalParams":
        """Build from laboratory units (frequencies in MHz, lengths in um)."""
        for name in FREQUENCY_FIELDS:
            if name in kw:
                kw[name] = mhz(kw[name])
        if "L" in kw:
            kw["sigma"] = kw.pop("L") / math.sqrt(TWO_PI)
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "PhysicalParams":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("parameter file must hold a JSON object")
        unknown = set(data) - {f.name for f in dataclasses.fields(cls)} - {"L"}
        if unknown:
            raise ValueError(f"unknown parameter keys: {sorted(unknown)}")
        return cls.from_mhz(**data)

    def to_mhz_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for name in FREQUENCY_FIELDS:
            out[name] = out[name] / TWO_PI
        return out

    def replace(self, **kw) -> "PhysicalParams":
        return dataclasses.replace(self, **kw)

    @property
    def L(self) -> float:
        """Effective cloud length sqrt(2 pi) sigma."""
        return math.sqrt(TWO_PI) * self.sigma

    @property
    def Delta_c(self) -> float:
        """Control-field detuning, delta - Delta."""
        return self.delta - self.Delta

    @property
    def eit_linewidth(self) -> float:
        return self.gamma + self.Omega ** 2 / abs(self.Delta)


@dataclass(frozen=True)
class DerivedParams:
    g: float
    L: float
    r_b: float
    OD_b: float
    q0: float
    q: float
    q_approx: float
    lam: float
    phi: float
    delta_TE: float
    U: float
    m: float
    rb_enhancement: str = "q0"
    extra: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("extra")
        d.update(self.extra)
        return d


def enhancement_q0(Omega, Delta, delta):
    """Closed-form enhancement factor Omega^2 / (Omega^2 - delta*Delta)."""
    den = Omega ** 2 - delta * Delta
    if den == 0:
        raise ValueError("Omega^2 == delta*Delta: q0 has a pole")
    return Omega ** 2 / den


def delta_te(Gamma, gamma, Omega, Delta_c):
    """Two-photon detuning where two- and three-level transmissions coincide.

    ``Delta_c`` is the control detuning, held fixed while the probe is scanned.
    """
    root = math.sqrt(Gamma ** 2 * Delta_c ** 2
                     + Gamma * (2 * Gamma + gamma) * (Gamma * gamma + Omega ** 2))
    return ((Gamma + gamma) * Delta_c + root) / (2 * Gamma + gamma)


def blockade_radius(C6_over_hbar, gamma, Omega, Delta, q):
    """Distance at which the vdW shift equals the full EIT linewidth (times q/2)."""
    return (0.5 * q * abs(C6_over_hbar) / (gamma + Omega ** 2 / abs(Delta))) ** (1 / 6)


def interaction_strength(q0, Gamma, Delta, OD_b):
    return (q0 * Gamma / (2 * Delta) * OD_b) ** 2


def coupling_density_peak(p: PhysicalParams) -> float:
    """Peak of g^2 rho(x) / c, in rad/(us um).

    Only this combination enters the propagation equations, so the atomic
    density never has to be specified separately from OD and sigma.
    """
    return p.OD * p.Gamma / (2.0 * math.sqrt(TWO_PI) * p.sigma)


def derive_params(p: PhysicalParams, rho0: float = 1.0,
                  rb_enhancement: str = "q0") -> DerivedParams:
    """All derived quantities for ``p``.

    ``rho0`` is the peak linear density (atoms/um) used only to quote the
    single-atom coupling ``g``.  ``rb_enhancement`` picks which enhancement
    factor ("q0" or "q") enters the blockade radius.
    """
    from rydvortex.single_photon import mass_from_susceptibility

    if p.OD <= 0:
        raise ValueError("OD must be positive to derive interaction parameters")
    if not rho0 > 0:
        raise ValueError("rho0 must be positive")
    q0 = enhancement_q0(p.Omega, p.Delta, p.delta)
    mass = mass_from_susceptibility(p)
    q = mass.q
    if rb_enhancement not in ("q0", "q"):
        raise ValueError("rb_enhancement must be 'q0' or 'q'")
    r_b = blockade_radius(p.C6_over_hbar, p.gamma, p.Omega, p.Delta,
                          q0 if rb_enhancement == "q0" else q)
    L = p.L
    OD_b = p.OD * r_b / L
    lam = interaction_strength(q0, p.Gamma, p.Delta, OD_b)
    phi = 0.5 * p.OD * q * p.Gamma / p.Delta
    U = p.OD / L * q * p.Gamma / p.Delta
    g = math.sqrt(coupling_density_peak(p) * p.c / rho0)
    return DerivedParams(
        g=g, L=L, r_b=r_b, OD_b=OD_b, q0=q0, q=q, q_approx=mass.q_approx,
        lam=lam, phi=phi, delta_TE=delta_te(p.Gamma, p.gamma, p.Omega, p.Delta_c),
        U=U, m=-U / 8.0, rb_enhancement=rb_enhancement,
        extra={"rho0": rho0},
    )

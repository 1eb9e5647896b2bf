"""
Single-photon slow light and the derived interaction scales
===========================================================

A single probe photon travelling through the Gaussian cloud under EIT.
We look at the transmission spectrum, the local propagation rate, and the
handful of scales (blockade radius, interaction strength, phase) that set
the stage for the two-photon problem.
"""

# %%
import numpy as np

from rydvortex.params import PhysicalParams, delta_te, derive_params
from rydvortex.single_photon import steady_state, transmission_spectrum

p = PhysicalParams()  # lab values, stored internally in rad/us and um
d = derive_params(p)
for name in ("q0", "q", "r_b", "OD_b", "lam"):
    print(f"{name:>5} = {getattr(d, name):.4g}")
print(f"  phi = {d.phi / np.pi:.3f} pi")

# %%
# The spectrum: three-level EIT (T3) against the fully blockaded two-level
# line (T2).  They cross at the transmission-equality detuning.
deltas = 2 * np.pi * np.linspace(-3, 3, 13)
sp = transmission_spectrum(p, deltas)
for row in sp.rows():
    print("delta/2pi = {:+.2f} MHz   T3 = {:.4f}   T2 = {:.4f}".format(row[0] / (2 * np.pi), *row[1:3]))

te = delta_te(p.Gamma, p.gamma, p.Omega, p.Delta_c)
print("transmission equality at delta/2pi =", round(te / (2 * np.pi), 4), "MHz")

# %%
# Field profile through the cloud.  Outside +-3 sigma nothing happens.
x = np.linspace(-5 * p.sigma, 5 * p.sigma, 11)
s = steady_state(p, x)
for xi, Ei in zip(x, s.E):
    print(f"x = {xi:+7.1f} um   |E| = {abs(Ei):.4f}   arg E = {np.angle(Ei):+.3f}")

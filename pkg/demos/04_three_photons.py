"""
Three photons: vortex lines and a vortex ring
=============================================

The three-photon field is built from pair bound states plus a three-body
term.  In Jacobi coordinates (eta, zeta) and propagation distance R its
phase singularities form six open lines and, with the three-body term, a
closed ring around the centre.
"""

# %%
import numpy as np

from rydvortex.params import PhysicalParams
from rydvortex.three_photon import (ThreePhotonAnsatz, central_phase, connected_g3,
                                    cylinder_punctures, group_velocity, phase_topology,
                                    ring_cross_section)

cfg = ThreePhotonAnsatz(E2=1.0, E3=3.0, a=1.0)  # lengths in units of a, R in 1/E2
eta = np.linspace(-6.03, 6.03, 121)
R = np.linspace(0.01, 1.6 * np.pi, 81)

for label, c in (("with three-body term", cfg), ("pairs only", cfg.without_three_body()),
                 ("E3 = 4 E2", ThreePhotonAnsatz(E2=1.0, E3=4.0, a=1.0))):
    top = phase_topology(c, eta, eta, R)
    print(f"{label:>22}: {top.n_lines} lines (from E2R = {top.first_R('lines') / np.pi:.3f} pi), "
          f"{top.n_rings} rings (from {top.first_R('rings') / np.pi:.3f} pi)")

# %%
# Where the lines cross a cylinder of radius 5a: twelve alternating charges.
p = cylinder_punctures(cfg, 5.0, np.linspace(0.5 * np.pi, 1.5 * np.pi, 201))
order = np.argsort(p.positions[:, 0])
print([f"{np.degrees(t):+.1f}:{q:+d}" for t, q in zip(p.positions[order, 0], p.charges[order])])

rc = ring_cross_section(cfg, np.linspace(-3, 3, 301), np.linspace(0.5 * np.pi, 1.5 * np.pi, 201))
print("ring cross-section:", [(round(float(e), 3), round(float(r) / np.pi, 3), q) for e, r, q, _ in rc.rows()])

# %%
# The centre collects a phase of -2 pi by the time the lines form.
_, ph = central_phase(cfg, np.pi)
print("central phase at E2 R = pi:", round(ph[-1] / np.pi, 3), "pi")

# %%
# Connected correlations along the eta axis at E2 R = pi.
for e in (0.0, 0.5, 1.0, 1.5, 2.0, 3.0):
    print(f"eta = {e:.1f} a   g3c = {connected_g3(cfg, e, 0.0, np.pi):+.3f}")

# Conversion to delays uses the slow-light group velocity.
print("v_g =", round(group_velocity(PhysicalParams()), 2), "um/us")

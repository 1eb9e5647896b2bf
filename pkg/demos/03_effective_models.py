"""
Effective models of the relative coordinate
===========================================

In the relative coordinate r = x1 - x2 the pair behaves like a particle of
negative mass in a soft-core well, with the centre-of-mass coordinate R
playing the role of time.  Here we check the exact delta-well expansion
against its closed forms, and map where vortices first appear.
"""

# %%
import numpy as np

from rydvortex.effective import (PHI0, Z0, EffectivePotential, bound_energy_threshold,
                                 bound_state_solve, delta_crosscheck, delta_potential_solution,
                                 erfi_closed_form, uniform_threshold, vortex_positions_analytic)

pot = EffectivePotential.from_lambda_phi(0.3, 2 * np.pi)
b = bound_state_solve(pot)
print(f"lambda = {pot.lam:.2f}: bound energy {b.E2:.4f}, delta-well value {pot.E2_delta:.4f}")

# %%
# First vortex pair predicted at E2 R = 3pi/4, lambda |r| / r_b = z0.
av = vortex_positions_analytic(pot.lam, pot.m, pot.r_b, k_max=2)
print("z0 =", round(Z0, 4))
for R in av.R:
    psi = delta_potential_solution(pot.lam, pot.m, pot.r_b, av.r, R)
    print(f"  E2 R = {av.E2 * R / np.pi:.3f} pi   |psi| there = {abs(psi):.3f}")

# %%
# The erfi form is an expansion in 1/(E2 R); it is good late, poor early.
r = np.linspace(0, 4, 5) * pot.r_b / pot.lam
for alpha in (0.75 * np.pi, 4 * np.pi):
    q = delta_potential_solution(pot.lam, pot.m, pot.r_b, r, alpha / pot.E2_delta)
    e = erfi_closed_form(pot.lam, pot.m, pot.r_b, r, alpha / pot.E2_delta).psi
    print(f"E2 R = {alpha / np.pi:.2f} pi: max |erfi - exact| = {np.max(np.abs(e - q)):.3f}")

cc = delta_crosscheck(0.3, (3 * np.pi, 6 * np.pi))
print("three-way RMS:", round(cc.numeric_vs_quadrature, 4), round(cc.erfi_vs_quadrature, 4),
      round(cc.erfi_vs_numeric, 4))

# %%
# Vortex thresholds of the uniform medium against the two simple estimates.
for lam in (0.1, 0.3, 1.5, 3.0):
    thr = uniform_threshold(lam, 5 * np.pi)
    print(f"lambda {lam:>4}: numerical {thr / np.pi:.3f} pi, "
          f"|E2| L = 3pi/4 gives {bound_energy_threshold(lam) / np.pi:.3f} pi, "
          f"phi0/lambda = {PHI0 / lam / np.pi:.3f} pi")

"""Extending the coherence lifetime of a spin in a non-Markovian heat bath.

The bath enters only through exponentially decaying correlation functions
C(t) = C0 exp(-kappa_b |t| - i omega t).  Modulating the spin-bath
coupling phase (m on the first J0 zero) filters the relaxation
coefficients: gamma picks up the factor 2 J1^2(m)(kappa_b - i Delta) /
((kappa_b - i Delta)^2 + nu^2), which collapses as nu grows past kappa_b.

The script evolves the reduced density matrix with and without modulation
and prints the coherence lifetimes plus a short decay table.  With
kappa_b = 1 and nu = 10 the lifetime grows by a factor ~187.

Run:  python demos/spin_coherence.py
"""

import numpy as np

from modbath import (BathParams, DensityMatrix2, ModulationParams, SpinParams,
                     TimeGrid, coherence_lifetime, evolve_rho, j0_zero,
                     relaxation_coefficient)

bath = BathParams(kappa_b=1.0, omega=1.0, c0_minus_plus=1.0, c0_plus_minus=0.0)
rho0 = DensityMatrix2(rho_ee=0.5, rho_gg=0.5, rho_eg=0.5)

cases = {
    "unmodulated": SpinParams(omega0=1.0, mod=ModulationParams(0.0, 1.0)),
    "m = j0_zero(1), nu = 10": SpinParams(omega0=1.0,
                                          mod=ModulationParams(j0_zero(1), 10.0)),
}

lifetimes = {}
for label, spin in cases.items():
    gd = relaxation_coefficient(bath, spin, "down")
    gu = relaxation_coefficient(bath, spin, "up")
    tau = coherence_lifetime(gd, gu)
    lifetimes[label] = tau
    print(f"{label}: gamma_down = {gd:.4e}, coherence lifetime = {tau:.4g}")

    grid = TimeGrid(t_max=3.0 * tau, dt=tau / 100.0)
    traj = evolve_rho(gd, gu, rho0, grid)
    for frac in (0.0, 1.0, 2.0, 3.0):
        i = int(frac * 100)
        print(f"    t = {traj.times[i]:9.3g}   |rho_eg| = "
              f"{abs(traj.rho_eg[i]):.4f}   rho_ee = {traj.rho_ee[i]:.4f}")
    print()

ratio = lifetimes["m = j0_zero(1), nu = 10"] / lifetimes["unmodulated"]
print(f"lifetime extension factor: {ratio:.1f}")
print("Full trajectories as CSV:  modbath spin-bath --out <dir>")

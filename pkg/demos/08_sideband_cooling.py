"""Pulsed resolved-sideband cooling from a thermal start.

Alternating red-sideband pulses and spontaneous repump scatters walk
population down the ladder. The randomized pulse-area strategy avoids
trapping in levels where a fixed area happens to complete a full flop.
"""

import numpy as np

from ionsim.cooling import CoolingConfig, cooling_limit, sideband_cool
from ionsim.quantum_core import DensityMatrix

n_max = 45
nbar0 = 2.0
ns = np.arange(n_max + 1)
P = (nbar0 / (1 + nbar0)) ** ns / (1 + nbar0)
P /= P.sum()
rho = DensityMatrix(np.diag(P).astype(complex), n_max)

cfg = CoolingConfig(
    eta=0.1,
    omega_z=2 * np.pi * 10e6,
    omega_R=2 * np.pi * 20e3,
    gamma_rad=2 * np.pi * 20e3,
    pulse_strategy="randomized",
    cycles=60,
)
res = sideband_cool(rho, cfg, seed=11)

print("cycle   <n>        P(n=0)")
for k in range(0, 61, 10):
    print(f"{k:4d}   {res.mean_n[k]:.6f}   {res.p0[k]:.6f}")

print(f"\nfinal <n> = {res.mean_n[-1]:.2e}, ground fraction "
      f"{res.p0[-1]:.6f}")
print(f"off-resonant limit nbar = "
      f"{cooling_limit(cfg.gamma_rad, cfg.omega_z):.2e}")

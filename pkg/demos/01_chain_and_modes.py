"""Equilibrium geometry and axial normal modes of a small ion string.

Solves the classical equilibrium of L ions in a harmonic axial well,
then diagonalizes the Hessian to get the normal-mode spectrum. The
lowest two modes (in-phase at omega_z, breathing at sqrt(3) omega_z)
are independent of L; the minimum gap shrinks roughly as L^-0.56.
"""

import math

import numpy as np
from scipy.constants import atomic_mass, elementary_charge

from ionsim.trap_model import (
    axial_normal_modes,
    chain_equilibrium,
    critical_anisotropy,
)

mass = 9.0 * atomic_mass
q = elementary_charge
omega_z = 2 * math.pi * 1.0e6

for L in (2, 3, 5, 10):
    g = chain_equilibrium(L, omega_z, q, mass)
    modes = axial_normal_modes(g, omega_z)
    ratios = modes.frequencies / omega_z
    gaps = np.diff(g.positions)
    print(f"L={L:2d}  scale s={g.scale_s*1e6:7.3f} um"
          f"  min gap={gaps.min()*1e6:7.3f} um"
          f"  fit 2sL^-0.56={2*g.scale_s*L**-0.56*1e6:7.3f} um")
    print(f"      mode ratios: {np.array2string(ratios, precision=6)}")

print()
print("closed forms: sqrt(3) =", f"{math.sqrt(3):.6f}",
      " sqrt(29/5) =", f"{math.sqrt(29/5):.6f}")

# How strong must radial confinement be before a 2-ion string buckles
# into a zigzag? The bound scales with the chain spacing.
out = critical_anisotropy(2, s_c=3.0e-6, charge=q, mass=mass)
print()
print(f"2 ions at 3 um spacing: radial secular frequency must exceed "
      f"{out.omega_r_bound/(2*math.pi)/1e6:.2f} MHz")

"""Error-budget table: how long until one motional quantum arrives.

Four independent heating channels, each with its own scaling, plus
background-gas collision rates. Numbers are order-of-magnitude design
tools, not precision predictions.
"""

import math

from scipy.constants import atomic_mass, elementary_charge

from ionsim.trap_model import collision_rates, heating_time_estimate

m = 9.0 * atomic_mass
q = elementary_charge

rows = [
    ("resistive", dict(r=0.0415, T=300.0, omega_z=2 * math.pi * 20e6,
                       ell_L=6.0e4)),
    ("stray_field", dict(S_U=1e-18, U0=17.0, E_s=100.0,
                         omega_z=2 * math.pi * 10e6)),
    ("patch", dict(theta=0.13, D=1e-15, kappa_patch=3.0, r_a=10e-9,
                   a_p=130e-6, omega_z=2 * math.pi * 11e6, ell_L=6.2e4)),
]
print("channel        t* (s)")
for model, kw in rows:
    est = heating_time_estimate(model, mass=m, charge=q, **kw)
    print(f"{model:12s} {est.t_star:10.3g}")

# room-temperature H2 at 1e-8 Pa
h2 = {"polarizability": 0.8023e-30, "mass": 2.0159 * atomic_mass}
r = collision_rates(h2, 1e-8, 300.0, m)
print("\nbackground H2 at 1e-8 Pa, 300 K:")
print(f"  Langevin rate  {r.gamma_langevin:.4f} /s "
      f"(k = {r.k_langevin:.3e} m^3/s)")
print(f"  elastic rate   {r.gamma_elastic:.4f} /s "
      f"(k = {r.k_elastic:.3e} m^3/s)")
print(f"  thermal speed  {r.v_thermal:.0f} m/s")

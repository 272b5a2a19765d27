"""Shear and circular profiles, and the structural conditions they satisfy.

Builds an exponential shear flow, checks the coercivity constant gamma0 for a
few wavenumbers against its closed form, then maps a point vortex to log-polar
coordinates where the vorticity gradient vanishes identically.
"""

import numpy as np

from inviscid_damping import Grid, Interval, make_shear_profile, make_circular_profile, to_log_polar
from inviscid_damping.degeneracy import check_H1, check_H2

alpha, eps_b = 0.5, 0.01
p = make_shear_profile("exponential", [alpha, eps_b], Interval(0, 2))
g = Grid(0, 2, 256)

gam, _ = check_H1(p, [1, 2, 4], g)
print("k   gamma0     closed form")
for k, v in gam.items():
    print(f"{k}   {v:.6f}   {1 - alpha**2 / (2 * k * k):.6f}")
print(f"eps0 = {check_H2(p, g):.6f}")

# A point vortex has U'' + U'/r ... = 0 after the change of variables: B vanishes.
pv = to_log_polar(make_circular_profile("point_vortex", [1.0], (0.5, 4.0)))
s = np.linspace(pv.domain.lo, pv.domain.hi, 9)
print("point vortex in log r: max |B| =", np.max(np.abs(pv.B(s))))

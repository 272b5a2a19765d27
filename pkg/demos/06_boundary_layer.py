"""The boundary layer at a degenerate wall.

The layer correction stays bounded while its wall trace grows like log t, and
its derivative is controlled only in the degeneracy-weighted norm.
"""

import math

import numpy as np

from inviscid_damping import Grid, Interval, make_shear_profile
from inviscid_damping.degeneracy import build_partition, build_modified_derivative, apply_Dy
from inviscid_damping.diagnostics import TimeSeries, fit_log_growth, nu_weighted_norms
from inviscid_damping.dynamics import Mode, SimConfig, evolve_beta

L = 4 * math.log(2)
p = make_shear_profile("exponential", [0.5, 0.1], Interval(0, L))
g = Grid(0, L, 1024)
P = build_partition(p, g)
md = build_modified_derivative(p, P)
m = Mode(p, g, 1, md)
ser = evolve_beta("a", p, P, 1.0, SimConfig(dt=0.02, t_end=50.0, output_every=100), m, t0=1.0)
for t, n, s in zip(ser.times, ser.norms, ser.states):
    D = apply_Dy(md, s.beta)
    print(f"t = {t:5.1f}  ||beta|| = {n:.4f}  weighted ||D beta|| = {nu_weighted_norms(D, p, g, 'a')[0]:.4f}  "
          f"||D beta|| = {g.norm(D):.3f}")
fit = fit_log_growth(TimeSeries(ser.times, np.abs(ser.trace)))
print(f"wall trace ~ {fit.C:.3f} log t")

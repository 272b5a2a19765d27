"""Algebraic decay of velocity and stream function for a nondegenerate profile.

Fits t^p to the weighted energies of an exponential shear flow.  Data with a
kink (H^1) gives velocity energy ~ t^-2, smooth data (H^2) gives stream energy ~ t^-4.
"""

import numpy as np

from inviscid_damping import Grid, Interval, make_shear_profile
from inviscid_damping.diagnostics import (TimeSeries, fit_decay, weighted_velocity_energy,
                                          weighted_streamfunction_energy)
from inviscid_damping.dynamics import Mode, ModeState, SimConfig, integrate, stable_dt

p = make_shear_profile("exponential", [0.5, 0.01], Interval(0, 1))
g = Grid(0, 1, 512)
k = 1
m = Mode(p, g, k)
dt = stable_dt(k, p, g, 0.05, 100.0)
cfg = SimConfig(dt=dt, t_end=100.0, output_every=int(round(0.5 / dt)))

for label, F0, energy in (("velocity, H1 data", 1 + np.maximum(0, 0.5 - np.abs(g.y - 0.5)), weighted_velocity_energy),
                          ("stream, H2 data", np.cos(g.y) * (1 + g.y / 2), weighted_streamfunction_energy)):
    traj = integrate(ModeState(k, 0.0, F0.astype(complex), g), cfg, m)
    ts = TimeSeries(np.array([s.t for s in traj[1:]]), np.array([energy(s, p, m) for s in traj[1:]]))
    fit = fit_decay(ts, window=(10, 90))
    print(f"{label:20s} exponent {fit.exponent:.3f}")

"""Time-dependent multipliers and the Lyapunov functional.

Under condition (P) the multiplier-weighted energy I(t) is nonincreasing and
its dissipation integrates to at most I(0).
"""

import math

import numpy as np

from inviscid_damping import Grid, Interval, make_shear_profile
from inviscid_damping.degeneracy import build_partition, degeneracy_report, check_P
from inviscid_damping.dynamics import Mode, ModeState, SimConfig, integrate
from inviscid_damping.multipliers import build_bases, MultiplierWeights, lyapunov_audit, h1_integral

L = 4 * math.log(2)
p = make_shear_profile("exponential", [0.5, 1e-3], Interval(0, L))
g = Grid(0, L, 2048)
P = build_partition(p, g)
k = 4
print("condition (P):", check_P(degeneracy_report(p, [k], g, P), P, k))

m = Mode(p, g, k)
y = g.y
F0 = (np.sin(np.pi * y / L) + 0.2).astype(complex)
traj = integrate(ModeState(k, 0.0, F0, g), SimConfig(dt=0.05, t_end=60.0), m)
B = build_bases(P, p)
led = lyapunov_audit(traj, MultiplierWeights("L2", B, k), P, p, m, B)
print(f"I(0) = {led.I[0]:.4f}  I(end) = {led.I[-1]:.4f}  violations {led.violations}  "
      f"int E dt = {led.energy_integral:.4f}")

# the time integral behind the H1-family weights, for a mode that crosses its critical time tau = nu/(kc) = 2
print("H1 weight integral:", h1_integral(2.0, 1, 1.0, 10.0, 0.5))

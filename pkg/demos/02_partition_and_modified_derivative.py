"""Overlapping windows adapted to the degeneracy, and the derivative built on them.

The windows sum to one in squares.  The modified derivative is d/dy scaled by
d(y) = sum_j chi_j(y) max_j|U'| / U'(y), which is large where U' is small.
"""

import math

import numpy as np

from inviscid_damping import Grid, Interval, make_shear_profile
from inviscid_damping.degeneracy import build_partition, build_modified_derivative, apply_Dy, degeneracy_report

L = 4 * math.log(2)
p = make_shear_profile("exponential", [0.5, 1e-3], Interval(0, L))
g = Grid(0, L, 1024)
P = build_partition(p, g)
chi, _, _ = P.windows(g.y)
print(f"{len(P)} windows, kappa = {P.kappa:.4f}")
print("max |sum chi^2 - 1| =", np.max(np.abs(np.sum(chi**2, axis=0) - 1)))

rep = degeneracy_report(p, [1, 2, 4, 8], g, P)
print(rep.text())

md = build_modified_derivative(p, P)
f = np.sin(g.y) + 0.1 * g.y**2
print(f"d ranges over [{md.d.min():.3f}, {md.d.max():.3f}]")
print("||D_y f|| =", g.norm(apply_Dy(md, f)), "  ||f'|| =", g.norm(np.cos(g.y) + 0.2 * g.y))

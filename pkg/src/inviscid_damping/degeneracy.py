"""Structural conditions on (U, B), the dyadic partition of unity and the
modified derivative D_y = d(y) dy."""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

OVERSAMPLE = 4


def _fine(grid):
    return np.linspace(grid.lo, grid.hi, OVERSAMPLE * grid.N + 1)


def _one_signed(dU, where="domain"):
    if np.all(dU > 0) or np.all(dU < 0):
        return
    raise ValueError(f"U' changes sign or vanishes on the {where}; split the domain where U' = 0")


def check_H1(p, ks, grid):
    """gamma0(k) = min_y (k^2|U'| - sign(U') U'''/2) / (k^2 |U'|), clamped to [0, 1].

    Returns (gamma0 by k, violation locations by k).
    """
    y = _fine(grid)
    dU, d3U = p.dU(y) * np.ones_like(y), p.d3U(y) * np.ones_like(y)
    gam, bad = {}, {}
    for k in ks:
        if k == 0:
            raise ValueError("k must be nonzero")
        k2 = float(k) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = (k2 * np.abs(dU) - 0.5 * np.sign(dU) * d3U) / (k2 * np.abs(dU))
        ratio = np.where(dU == 0, 0.0, ratio)
        bad[k] = y[ratio <= 0].tolist()
        gam[k] = float(np.clip(ratio.min(), 0.0, 1.0))
    return gam, bad


def check_H2(p, grid):
    """epsilon0 = max_y (|B| + |B'| + |U''|) / |U'|; inf where U' = 0 but the numerator is not."""
    y = _fine(grid)
    s = p.sample(y)
    num = np.abs(s["B"]) + np.abs(s["dB"]) + np.abs(s["d2U"])
    den = np.abs(s["dU"])
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.where(num > 0, np.inf, 0.0))
    return float(r.max())


def _ramp(x):
    # quintic ramp 0 -> 1 on [0, 1]; s', s'' vanish at both ends, so the windows are C^2
    return x**3 * (10 - 15 * x + 6 * x * x), 30 * x * x * (1 - x) ** 2, 60 * x * (1 - x) * (1 - 2 * x)


@dataclass
class Partition:
    intervals: list              # [(a_j, b_j)]
    grid: object
    overlap_fraction: float
    umax: np.ndarray             # max |U'| on I_j
    umin: np.ndarray             # min |U'| on I_j
    chi: np.ndarray = None       # (J, N+1) windows on the grid
    dchi: np.ndarray = None
    d2chi: np.ndarray = None
    W1: np.ndarray = None        # ||chi_j||_{W^{1,inf}}
    W2: np.ndarray = None        # ||chi_j||_{W^{2,inf}}

    def __post_init__(self):
        y = self.grid.y
        self.chi, self.dchi, self.d2chi = self.windows(y)
        yf = _fine(self.grid)
        c, c1, c2 = self.windows(yf)
        a0 = np.abs(c).max(axis=1)
        a1 = np.abs(c1).max(axis=1)
        a2 = np.abs(c2).max(axis=1)
        self.W1 = np.maximum(a0, a1)
        self.W2 = np.maximum(self.W1, a2)

    def __len__(self):
        return len(self.intervals)

    @property
    def kappa(self):
        return min(b - a for a, b in self.intervals)

    @property
    def bilipschitz_ratio(self):
        return float(np.max(self.umax / self.umin))

    @property
    def window_constant(self):
        """Smallest C >= 1 with ||chi||_{W1} <= C(1+1/k) and ||chi||_{W2} <= C^2 (1+1/k)^2."""
        s = 1 + 1 / self.kappa
        return float(max(1.0, np.max(self.W1) / s, np.sqrt(np.max(self.W2)) / s))

    def windows(self, y):
        """chi_j, chi_j', chi_j'' evaluated at arbitrary points."""
        y = np.asarray(y, dtype=float)
        J = len(self.intervals)
        chi = np.zeros((J, y.size))
        d1 = np.zeros_like(chi)
        d2 = np.zeros_like(chi)
        for j, (a, b) in enumerate(self.intervals):
            inside = (y >= a) & (y <= b)
            chi[j, inside] = 1.0
            if j > 0:
                # rising half of the overlap with I_{j-1}
                lo, hi = a, self.intervals[j - 1][1]
                m = (y >= lo) & (y <= hi)
                w = hi - lo
                s, s1, s2 = _ramp((y[m] - lo) / w)
                th, th1, th2 = 0.5 * np.pi * s, 0.5 * np.pi * s1 / w, 0.5 * np.pi * s2 / w**2
                chi[j, m] = np.sin(th)
                d1[j, m] = np.cos(th) * th1
                d2[j, m] = -np.sin(th) * th1**2 + np.cos(th) * th2
            if j < J - 1:
                lo, hi = self.intervals[j + 1][0], b
                m = (y >= lo) & (y <= hi)
                w = hi - lo
                s, s1, s2 = _ramp((y[m] - lo) / w)
                th, th1, th2 = 0.5 * np.pi * s, 0.5 * np.pi * s1 / w, 0.5 * np.pi * s2 / w**2
                chi[j, m] = np.cos(th)
                d1[j, m] = -np.sin(th) * th1
                d2[j, m] = -np.cos(th) * th1**2 - np.sin(th) * th2
        return chi, d1, d2


def build_partition(p, grid, overlap_fraction=0.5):
    """Overlapping intervals on dyadic level sets of |U'|.

    In the level variable lam = log2|U'| the supports all have the same length
    L <= 1 and consecutive ones overlap by overlap_fraction * L.  When the whole
    domain already has max|U'|/min|U'| <= 2^(1+overlap) a single window is used.
    """
    if not 0 < overlap_fraction <= 0.5:
        raise ValueError("overlap_fraction must be in (0, 0.5]")
    yf = _fine(grid)
    dU = p.dU(yf) * np.ones_like(yf)
    _one_signed(dU)
    lam = np.log2(np.abs(dU))
    R = lam.max() - lam.min()

    def extrema(a, b):
        s = np.linspace(a, b, 2001)
        v = np.abs(p.dU(s) * np.ones_like(s))
        return v.max(), v.min()

    if R <= 1 + overlap_fraction:
        iv = [(grid.lo, grid.hi)]
    else:
        steps = np.diff(lam)
        if not (np.all(steps >= 0) or np.all(steps <= 0)):
            raise ValueError("|U'| is not monotone; level-set partition needs a monotone |U'|")
        sp = 1 - overlap_fraction
        J = int(np.ceil((R - 1) / sp)) + 1
        L = R / (1 + (J - 1) * sp)
        lam0 = lam[0]
        sgn = 1.0 if lam[-1] > lam[0] else -1.0
        f = lambda y, target: np.log2(abs(float(p.dU(y)))) - target

        def at(level):
            if level <= 0:
                return grid.lo
            if level >= R:
                return grid.hi
            return brentq(f, grid.lo, grid.hi, args=(lam0 + sgn * level,), xtol=1e-14, rtol=1e-14)

        iv = [(at(j * sp * L), at(j * sp * L + L)) for j in range(J)]
        iv[0] = (grid.lo, iv[0][1])
        iv[-1] = (iv[-1][0], grid.hi)
        if min(b - a for a, b in iv) < 4 * grid.h:
            raise ValueError("domain too short for the level-set partition at this resolution")
    ext = np.array([extrema(a, b) for a, b in iv])
    return Partition(iv, grid, overlap_fraction, ext[:, 0], ext[:, 1])


@dataclass
class PCheck:
    ok: bool
    first_ok: bool
    second_ok: bool
    epsilon0: float
    lhs2: float
    rhs2: float
    k: int

    def __bool__(self):
        return self.ok

    @property
    def failed(self):
        out = []
        if not self.first_ok:
            out.append(f"eps0 = {self.epsilon0:.6g} > k/2 = {self.k / 2:g}")
        if not self.second_ok:
            out.append(f"eps0 C (1+1/kappa)^2 = {self.lhs2:.6g} > gamma0 k^2/4 = {self.rhs2:.6g}")
        return out


@dataclass
class DegeneracyReport:
    gamma0: dict
    epsilon0: float
    kappa: float
    bilipschitz_ratio: float
    window_constant: float
    P_ok: dict = field(default_factory=dict)
    violation_locations: dict = field(default_factory=dict)
    label: str = ""

    def rows(self):
        for k in sorted(self.gamma0):
            yield {"k": k, "gamma0": self.gamma0[k], "epsilon0": self.epsilon0, "kappa": self.kappa,
                   "bilipschitz_ratio": self.bilipschitz_ratio, "window_constant": self.window_constant,
                   "P_ok": int(bool(self.P_ok.get(k, False))),
                   "H1_violations": len(self.violation_locations.get(k, []))}

    def text(self):
        lines = [f"profile = {self.label}", f"epsilon0 = {self.epsilon0:.17g}",
                 f"kappa = {self.kappa:.17g}", f"bilipschitz_ratio = {self.bilipschitz_ratio:.17g}",
                 f"window_constant = {self.window_constant:.17g}"]
        for k in sorted(self.gamma0):
            lines.append(f"gamma0[k={k}] = {self.gamma0[k]:.17g}")
            lines.append(f"P_ok[k={k}] = {bool(self.P_ok.get(k, False))}")
        return "\n".join(lines) + "\n"


def check_P(report, partition, k):
    g = report.gamma0.get(k)
    if g is None:
        raise KeyError(f"gamma0 not computed for k={k}")
    e = report.epsilon0
    C = partition.window_constant
    lhs2 = e * C * (1 + 1 / partition.kappa) ** 2
    rhs2 = g * k * k / 4
    first = e <= abs(k) / 2
    second = lhs2 <= rhs2
    return PCheck(bool(first and second and g > 0), bool(first), bool(second), e, lhs2, rhs2, k)


def degeneracy_report(p, ks, grid, partition=None, overlap_fraction=0.5):
    if partition is None:
        partition = build_partition(p, grid, overlap_fraction)
    gam, bad = check_H1(p, ks, grid)
    rep = DegeneracyReport(gam, check_H2(p, grid), partition.kappa, partition.bilipschitz_ratio,
                           partition.window_constant, violation_locations=bad, label=p.label)
    rep.P_ok = {k: bool(check_P(rep, partition, k)) for k in ks}
    return rep


@dataclass
class ModifiedDerivative:
    d: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    grid: object
    bound: float            # max |d1| + |d2| on the grid
    bound_limit: float      # 2 C eps0 (1 + 1/kappa)^2

    @property
    def bound_holds(self):
        return self.bound <= self.bound_limit

    def bound_vs_gamma(self, gamma0, k):
        """True when max|d1| + |d2| <= gamma0 k^2 / 2."""
        return self.bound <= gamma0 * k * k / 2


def build_modified_derivative(p, partition):
    g = partition.grid
    dU = p.dU(g.y) * np.ones_like(g.y)
    _one_signed(dU)
    m = partition.umax[:, None] / dU[None, :]
    d = np.sum(m * partition.chi, axis=0)
    d1 = np.sum(m * partition.dchi, axis=0)
    d2 = np.sum(m * partition.d2chi, axis=0)
    eps0 = check_H2(p, g)
    limit = 2 * partition.window_constant * eps0 * (1 + 1 / partition.kappa) ** 2
    return ModifiedDerivative(d, d1, d2, g, float(np.max(np.abs(d1) + np.abs(d2))), float(limit))


def apply_Dy(md, f):
    md.grid.check(f)
    return md.d * md.grid.ddy(f)

"""Local Fourier bases on bilipschitz charts, diagonal multiplier weights, and
the quadratic form <F, A(t) F> with A(t) = sum_j chi_j A_j(t) chi_j.

On I_j = (a_j, b_j) the chart is z = |U(y) - U(a_j)| / c_j with c_j = min |U'|,
so dz = (|U'|/c_j) dy and e_n = exp(i n l_j z)/sqrt(Z_j), l_j = 2 pi / Z_j, is an
orthonormal basis of L^2(I_j, |U'|/c_j dy).  Frequencies are quoted in chart
units, nu = n l_j; the transported vorticity e^{-iktU} F puts the coefficient of
e_n at chart frequency nu - k t c_j.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline


@dataclass
class LocalBasis:
    j: int
    a: float
    b: float
    c: float
    Z: float
    ell: float
    N_modes: int
    y_nodes: np.ndarray      # y(z_m) for the uniform chart nodes z_m = m Z / M
    idx: np.ndarray          # grid node indices inside I_j
    z_grid: np.ndarray       # chart coordinate at those grid nodes
    chart: object = field(repr=False, default=None)

    @property
    def M(self):
        return 2 * self.N_modes

    @property
    def n(self):
        return np.fft.fftfreq(self.M, 1.0 / self.M).astype(int)

    @property
    def nu(self):
        return self.n * self.ell

    def mode(self, n, y):
        return np.exp(1j * n * self.ell * self.chart(y)) / np.sqrt(self.Z)


def build_basis(partition, profile, j, N_modes=None):
    grid = partition.grid
    a, b = partition.intervals[j]
    idx = np.nonzero((grid.y >= a - 1e-12) & (grid.y <= b + 1e-12))[0]
    P = idx.size
    if N_modes is None:
        N_modes = P // 2
    if N_modes < 1 or N_modes > P // 2:
        raise ValueError(f"N_modes={N_modes} exceeds the grid Nyquist limit {P // 2} on I_{j}")
    s = np.linspace(a, b, 4001)
    dU = profile.dU(s) * np.ones_like(s)
    if not (np.all(dU > 0) or np.all(dU < 0)):
        raise ValueError(f"U' is not one-signed on I_{j}")
    c = float(np.abs(dU).min())
    Ua = float(profile.U(a))
    chart = lambda y: np.abs(profile.U(np.asarray(y, dtype=float)) - Ua) / c
    Z = float(chart(b))
    M = 2 * N_modes
    zm = np.arange(M) * Z / M
    # invert the chart: interpolate on a dense sample, then polish with Newton
    zs = chart(s)
    ym = np.interp(zm, zs, s)
    for _ in range(6):
        ym = ym - (chart(ym) - zm) / (np.abs(profile.dU(ym)) / c)
        ym = np.clip(ym, a, b)
    return LocalBasis(j, a, b, c, Z, 2 * np.pi / Z, int(N_modes), ym, idx, chart(grid.y[idx]), chart)


def build_bases(partition, profile, N_modes=None):
    return [build_basis(partition, profile, j, N_modes) for j in range(len(partition))]


def _spline(field, grid):
    return CubicSpline(grid.y, np.asarray(field, dtype=complex))


def expand(field, basis, partition=None, localize=True, spline=None, grid=None):
    """Coefficients of chi_j field (or of field itself when localize=False) in fftfreq order."""
    grid = grid or (partition.grid if partition is not None else None)
    if spline is None:
        if grid is None:
            raise ValueError("expand needs the grid (directly or through the partition)")
        grid.check(field)
        spline = _spline(field, grid)
    g = spline(basis.y_nodes)
    if localize:
        if partition is None:
            raise ValueError("localized expansion needs the partition")
        g = g * partition.windows(basis.y_nodes)[0][basis.j]
    return np.sqrt(basis.Z) / basis.M * np.fft.fft(g)


def synthesize(coeffs, basis, grid):
    """Field on the grid, zero outside I_j."""
    coeffs = np.asarray(coeffs)
    if coeffs.size != basis.M:
        raise ValueError("coefficient vector does not match the basis")
    out = np.zeros(len(grid), dtype=complex)
    ph = np.exp(1j * np.outer(basis.z_grid, basis.nu))
    out[basis.idx] = ph @ coeffs / np.sqrt(basis.Z)
    return out


def gram_matrix(basis, profile, nmax=8, order=16, panels=None):
    """Gram matrix of e_{-nmax..nmax} by composite Gauss-Legendre quadrature in y."""
    panels = panels or max(64, 4 * nmax)
    x, w = leggauss(order)
    edges = np.linspace(basis.a, basis.b, panels + 1)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
    y = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wy = (half[:, None] * w[None, :]).ravel() * np.abs(profile.dU(y)) / basis.c
    ns = np.arange(-nmax, nmax + 1)
    E = np.exp(1j * np.outer(ns, basis.ell * basis.chart(y))) / np.sqrt(basis.Z)
    return (E * wy[None, :]) @ E.conj().T


# weights

def weight_L2(j, n, k, t, basis):
    """exp(arctan(n l_j - k t c_j)); decreasing in t, in [e^{-pi/2}, e^{pi/2}]."""
    return np.exp(np.arctan(np.asarray(n) * basis.ell - k * t * basis.c))


def _h1_factor(nu, k, c, tau, delta, grouping):
    # integrand = factor(tau) * tau^(delta - 1)
    r = np.abs(nu - k * tau * c)
    if grouping == "as_written":
        den = abs(k) + r ** (1 - delta)
    elif grouping == "grouped":
        den = (abs(k) + r) ** (1 - delta)
    else:
        raise ValueError(f"unknown grouping {grouping!r}")
    return c / (den * (abs(k) * c) ** (1 - delta))


def h1_integrand(nu, k, c, tau, delta, grouping="as_written"):
    return _h1_factor(nu, k, c, tau, delta, grouping) * np.abs(tau) ** (delta - 1)


def _product_trapezoid(nu, k, c, t0, t1, delta, grouping):
    # the smooth factor is linear on [t0, t1]; tau^(delta-1) is integrated exactly
    g0 = _h1_factor(nu, k, c, t0, delta, grouping)
    g1 = _h1_factor(nu, k, c, t1, delta, grouping)
    m0 = (t1**delta - t0**delta) / delta
    m1 = (t1 ** (delta + 1) - t0 ** (delta + 1)) / (delta + 1)
    return (g0 * (t1 * m0 - m1) + g1 * (m1 - t0 * m0)) / (t1 - t0)


def _graded(p, q, eps=0.05, floor=1e-12):
    # points accumulating geometrically at p, spacing ~ eps * distance to p
    L = abs(q - p)
    if L == 0:
        return np.array([p])
    m = int(np.ceil(np.log(L / (floor * max(1.0, L))) / np.log1p(eps)))
    x = (1 + eps) ** -np.arange(m, -1, -1.0)
    return p + (q - p) * x


def h1_increment(nu, k, c, t0, t1, delta, grouping="as_written", window=60):
    """Integral of the H1 weight integrand over [t0, t1].

    Product trapezoid rule (tau^(delta-1) integrated exactly, the remaining factor
    linear).  Within `window` steps of the resonance tau_r = nu/(k c), where that
    factor has a |tau - tau_r|^(1-delta) cusp, the step is subdivided with spacing
    proportional to the distance from tau_r.
    """
    nu = np.asarray(nu, dtype=float)
    out = np.atleast_1d(np.asarray(_product_trapezoid(nu, k, c, t0, t1, delta, grouping), dtype=float)).copy()
    dt = t1 - t0
    flat_nu = np.atleast_1d(nu)
    tr = flat_nu / (k * c)
    near = (tr >= t0 - window * dt) & (tr <= t1 + window * dt)
    for i in np.nonzero(near)[0]:
        r = tr[i]
        if r <= t0:
            pts = _graded(r, t1)
        elif r >= t1:
            pts = _graded(r, t0)
        else:
            pts = np.concatenate([_graded(r, t0), _graded(r, t1)])
        pts = np.unique(np.clip(np.concatenate([pts, [t0, t1]]), t0, t1))
        out[i] = np.sum(_product_trapezoid(flat_nu[i], k, c, pts[:-1], pts[1:], delta, grouping))
    return out.reshape(nu.shape) if nu.ndim else float(out[0])


def h1_integral(nu, k, c, t, delta, dt=0.01, grouping="as_written"):
    if not 0 < delta < 1:
        raise ValueError("delta must be in (0, 1)")
    if t <= 0:
        return np.zeros_like(np.asarray(nu, dtype=float))
    n = max(1, int(np.ceil(t / dt - 1e-9)))
    ts = np.linspace(0.0, t, n + 1)
    acc = np.zeros_like(np.asarray(nu, dtype=float))
    for t0, t1 in zip(ts[:-1], ts[1:]):
        acc = acc + h1_increment(nu, k, c, t0, t1, delta, grouping)
    return acc


def weight_H1(j, n, k, t, delta, basis, dt=0.01, grouping="as_written"):
    if not 0 < delta < 1:
        raise ValueError("delta must be in (0, 1)")
    nu = np.asarray(n) * basis.ell
    return np.exp(np.arctan(nu - k * t * basis.c) + h1_integral(nu, k, basis.c, t, delta, dt, grouping))


class MultiplierWeights:
    """Diagonal entries of A_j(t) = scale * diag(w_{j,n}(t)).

    The default scale e^{pi/2} makes A(t) >= Id for the L2 family, so that the
    weight decay rate k c_j w / (1 + (nu - k t c_j)^2) dominates half the
    velocity energy of each resonant mode.  The H1 family carries its running
    time integral.
    """

    scale = float(np.exp(np.pi / 2))

    def __init__(self, family, bases, k, delta=0.1, grouping="as_written", t=0.0):
        if family not in ("L2", "H1"):
            raise ValueError(f"unknown multiplier family {family!r}")
        if family == "H1" and not 0 < delta < 1:
            raise ValueError("delta must be in (0, 1)")
        self.family, self.bases, self.k = family, bases, k
        self.delta, self.grouping = delta, grouping
        self.t = 0.0
        self.integral = [np.zeros(b.M) for b in bases]
        if t > 0:
            self.advance(t)

    def advance(self, t, dt=None):
        if t < self.t:
            raise ValueError("weights only move forward in time")
        if self.family == "H1" and t > self.t:
            n = 1 if dt is None else max(1, int(np.ceil((t - self.t) / dt - 1e-9)))
            ts = np.linspace(self.t, t, n + 1)
            for i, b in enumerate(self.bases):
                for t0, t1 in zip(ts[:-1], ts[1:]):
                    self.integral[i] += h1_increment(b.nu, self.k, b.c, t0, t1, self.delta, self.grouping)
        self.t = t

    def values(self):
        out = []
        for i, b in enumerate(self.bases):
            w = np.log(self.scale) + np.arctan(b.nu - self.k * self.t * b.c)
            if self.family == "H1":
                w = w + self.integral[i]
            out.append(np.exp(w))
        return out


def quad_form(weights, partition, bases, field):
    """sum_j sum_n w_{j,n} |(chi_j field)_n|^2; weights=None means unit weights."""
    partition.grid.check(field)
    if isinstance(weights, MultiplierWeights):
        weights = weights.values()
    sp = _spline(field, partition.grid)
    total = 0.0
    for i, b in enumerate(bases):
        c = expand(field, b, partition, spline=sp)
        w = 1.0 if weights is None else weights[i]
        total += float(np.sum(w * np.abs(c) ** 2))
    return total


def norm_equivalence(partition, bases, profile, weights=None, fields=None):
    """(lower, upper) constants with lower ||f||^2 <= quad_form <= upper ||f||^2.

    Bounds come from the weight range and the chart weight |U'|/c_j; when test
    fields are given the measured extremes of the ratio are returned as well.
    """
    if isinstance(weights, MultiplierWeights):
        weights = weights.values()
    wmin = 1.0 if weights is None else min(float(np.min(w)) for w in weights)
    wmax = 1.0 if weights is None else max(float(np.max(w)) for w in weights)
    ratio = max(float(np.max(np.abs(profile.dU(np.linspace(b.a, b.b, 2001))) / b.c)) for b in bases)
    out = {"lower": wmin, "upper": wmax * ratio}
    if fields is not None:
        g = partition.grid
        r = [quad_form(weights, partition, bases, f) / g.integrate(np.abs(f) ** 2) for f in fields]
        out["measured_lower"], out["measured_upper"] = min(r), max(r)
    return out


@dataclass
class AuditLedger:
    t: np.ndarray
    I: np.ndarray
    dIdt: np.ndarray
    energy: np.ndarray
    violation: np.ndarray
    tol: float

    @property
    def violations(self):
        return int(np.sum(self.violation))

    @property
    def energy_integral(self):
        return float(np.trapezoid(self.energy, self.t))

    def rows(self):
        for i in range(self.t.size):
            yield {"t": self.t[i], "I": self.I[i], "dIdt": self.dIdt[i],
                   "energy": self.energy[i], "violation_flag": int(self.violation[i])}


def lyapunov_audit(trajectory, weights, partition, profile, mode, bases, tol=1e-6):
    """Check d/dt I + 1/2 int |U'| |grad_k psi|^2 <= tol (1 + |I(0)|) between outputs.

    weights: a fresh MultiplierWeights at t = trajectory[0].t; it is advanced
    along the trajectory.
    """
    from .diagnostics import weighted_velocity_energy

    t = np.array([s.t for s in trajectory])
    I = np.empty(t.size)
    E = np.empty(t.size)
    for i, s in enumerate(trajectory):
        weights.advance(s.t, dt=(t[1] - t[0]) if t.size > 1 else None)
        I[i] = quad_form(weights, partition, bases, s.F)
        E[i] = weighted_velocity_energy(s, profile, mode)
    dIdt = np.zeros(t.size)
    dIdt[1:] = np.diff(I) / np.diff(t)
    Ebar = np.zeros(t.size)
    Ebar[1:] = 0.5 * (E[1:] + E[:-1])
    lim = tol * (1 + abs(I[0]))
    viol = np.zeros(t.size, dtype=bool)
    viol[1:] = dIdt[1:] + 0.5 * Ebar[1:] > lim
    return AuditLedger(t, I, dIdt, E, viol, lim)

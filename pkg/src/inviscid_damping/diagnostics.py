"""Weighted norms, energies, fits, and residual checks on simulated data."""

from dataclasses import dataclass

import numpy as np

from .elliptic import EllipticOp, solve_dirichlet, homogeneous_solution


@dataclass
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")

    def window(self, lo, hi):
        m = (self.times >= lo - 1e-12) & (self.times <= hi + 1e-12)
        return self.times[m], self.values[m]


@dataclass
class DecayFit:
    exponent: float
    log_constant: float
    window: tuple
    residual: float


@dataclass
class LogFit:
    C: float
    intercept: float
    residual: float


def _stream0(state, profile, mode):
    """Unscattered stream function psi = e^{-iktU} Psi."""
    return mode.stream_unscattered(state.F, state.t)


def weighted_velocity_energy(state, profile, mode):
    psi = _stream0(state, profile, mode)
    g = state.grid
    return float(g.integrate(np.abs(mode.dU) * (state.k**2 * np.abs(psi) ** 2 + np.abs(g.ddy(psi)) ** 2)))


def weighted_velocity_energy_scattered(state, profile, mode):
    """Same energy from |grad_{k,t} Psi|^2, Psi = e^{iktU} psi.

    A = dy - iktU' is discretized through A = e^{iktU} dy e^{-iktU}, as in the
    elliptic solver, so the two gauges agree to roundoff.
    """
    Psi = mode.stream(state.F, state.t)
    g = state.grid
    ph = mode.phase(state.t)
    A = ph * g.ddy(np.conj(ph) * Psi)
    return float(g.integrate(np.abs(mode.dU) * (state.k**2 * np.abs(Psi) ** 2 + np.abs(A) ** 2)))


def weighted_streamfunction_energy(state, profile, mode):
    psi = _stream0(state, profile, mode)
    return float(state.grid.integrate(np.abs(mode.dU) * np.abs(psi) ** 2))


def sobolev_norm(field, grid, order=0, weight="none", profile=None, k=None, t=0.0):
    f = np.asarray(field, dtype=complex)
    y = grid.y
    if weight == "none":
        w = np.ones_like(y)
    elif weight == "|U'|":
        w = np.abs(profile.dU(y) * np.ones_like(y))
    elif weight == "dist-to-wall":
        w = np.minimum(1.0, np.minimum(y - grid.lo, grid.hi - y)) ** 2
    elif weight == "H1_t":
        # ||g||^2 + ||grad_{k,t} g||^2, grad_{k,t} = (ik, dy - iktU')
        dU = profile.dU(y) * np.ones_like(y)
        A = grid.ddy(f) - 1j * k * t * dU * f
        return float(np.sqrt(grid.integrate(np.abs(f) ** 2 + k * k * np.abs(f) ** 2 + np.abs(A) ** 2)))
    else:
        raise ValueError(f"unknown weight tag {weight!r}")
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    val = np.abs(f) ** 2
    if order == 1:
        val = val + np.abs(grid.ddy(f)) ** 2
    return float(np.sqrt(grid.integrate(w * val)))


def fit_decay(series, window=None):
    t, v = (series.times, series.values) if window is None else series.window(*window)
    if t.size < 2:
        raise ValueError("fit window holds fewer than two samples")
    if np.any(v <= 0):
        raise ValueError("nonpositive values in the fit window")
    X = np.log(t)
    Y = np.log(v)
    A = np.vstack([X, np.ones_like(X)]).T
    (s, c), *_ = np.linalg.lstsq(A, Y, rcond=None)
    res = float(np.sqrt(np.mean((A @ [s, c] - Y) ** 2)))
    return DecayFit(float(s), float(c), (float(t[0]), float(t[-1])), res)


def default_window(k, profile, grid, t_end):
    umin = np.min(np.abs(profile.dU(grid.y) * np.ones(len(grid))))
    return (10.0 / (abs(k) * umin), 0.9 * t_end)


def fit_log_growth(series):
    """value ~ C log(2 + t) + c0 by least squares; residual is the RMS misfit."""
    t, v = series.times, series.values
    X = np.log(2 + t)
    A = np.vstack([X, np.ones_like(X)]).T
    (C, c0), *_ = np.linalg.lstsq(A, v, rcond=None)
    return LogFit(float(C), float(c0), float(np.sqrt(np.mean((A @ [C, c0] - v) ** 2))))


def growth_verdict(series):
    """Consistent with divergence: monotone over the last half-window and a
    log(2+t) fit with positive slope whose residual is under 20% of the slope."""
    t, v = series.times, series.values
    half = t >= t[0] + 0.5 * (t[-1] - t[0])
    monotone = bool(np.all(np.diff(v[half]) > 0))
    fit = fit_log_growth(series)
    return {"monotone": monotone, "slope": fit.C, "residual": fit.residual,
            "diverging": monotone and fit.C > 0 and fit.residual < 0.2 * fit.C}


def last_half_increase(series):
    t, v = series.times, series.values
    i = np.searchsorted(t, t[0] + 0.5 * (t[-1] - t[0]))
    return float((v[i:].max() - v[i]) / v[i])


def nu_weighted_norms(DyBeta, profile, grid, side="a"):
    """L^2 norms with weights min(sqrt|U - U(side)|, 1) and min(sqrt(|U'||U - U(side)|), 1), and the L^1 norm."""
    y = grid.y
    U = profile.U(y) * np.ones_like(y)
    dU = profile.dU(y) * np.ones_like(y)
    dist = np.abs(U - (U[0] if side == "a" else U[-1]))
    f2 = np.abs(DyBeta) ** 2
    w1 = np.minimum(np.sqrt(dist), 1.0)
    w2 = np.minimum(np.sqrt(np.abs(dU) * dist), 1.0)
    return (float(np.sqrt(grid.integrate(w1**2 * f2))), float(np.sqrt(grid.integrate(w2**2 * f2))),
            float(grid.integrate(np.abs(DyBeta))))


class DyFCheck:
    """Both sides of the evolution identity for D_y F at a given time.

    With m = d1/d, c = (U''/U') d and A = dy - iktU':
      dt D_yF = ik B Phi + ik (D_y B) Psi + ik B [D Psi(a) e_a ht_a + D Psi(b) e_b ht_b],
      -M_t Phi = D_yF - [c' + (U''/U') d1 - 2 A c] A Psi,
    where ik D Psi at the walls is rewritten by integrating the Green identity
    against e^{ikt(U - U(s))} h_s by parts.
    """

    def __init__(self, mode):
        self.mode = mode
        md = mode.md
        op0 = EllipticOp("LaplaceK", mode.k, mode.profile, mode.grid, 0.0, md)
        self.h = {s: homogeneous_solution(op0, s, "h").values for s in "ab"}
        self.ht = {s: homogeneous_solution(op0, s, "h_tilde").values for s in "ab"}
        self.op1 = EllipticOp("ModifiedH1", mode.k, mode.profile, mode.grid, 0.0, md)

    def sides(self, F, t):
        m, g, md = self.mode, self.mode.grid, self.mode.md
        k, d = m.k, md.d
        ph = m.phase(t)
        Psi = m.stream(F, t)
        psi0 = np.conj(ph) * Psi
        dpsi0 = g.ddy(psi0)
        lhs = 1j * k * d * (m.dB * Psi + m.B * ph * (dpsi0 + 1j * k * t * m.dU * psi0))
        r = m.d2U / m.dU
        c = r * d
        K = ph * ((g.ddy(c) + r * md.d1) * dpsi0 - 2 * g.ddy(c * dpsi0))
        DyF = d * g.ddy(F)
        Phi = solve_dirichlet(self.op1.at(t), DyF - K)
        w = g.weights
        ea = np.exp(1j * k * t * (m.U - m.U[0]))
        eb = np.exp(1j * k * t * (m.U - m.U[-1]))
        Ia = (d[0] / t) * (F[0] / m.dU[0] + np.sum(w * (DyF * self.h["a"] / (m.dU * d)
                                                        + F * g.ddy(self.h["a"] / m.dU)) * np.conj(ea)))
        Ib = (d[-1] / t) * (-F[-1] / m.dU[-1] + np.sum(w * (DyF * self.h["b"] / (m.dU * d)
                                                          + F * g.ddy(self.h["b"] / m.dU)) * np.conj(eb)))
        rhs = 1j * k * m.B * Phi + 1j * k * d * m.dB * Psi + m.B * (Ia * ea * self.ht["a"] - Ib * eb * self.ht["b"])
        return lhs, rhs


def residual_DyF(trajectory, profile, partition, t_samples, mode):
    """Relative discrete L^2 residual of the D_y F identity at the states nearest t_samples."""
    from .dynamics import resolution_ok

    chk = DyFCheck(mode)
    times = np.array([s.t for s in trajectory])
    out = []
    for ts in t_samples:
        s = trajectory[int(np.argmin(np.abs(times - ts)))]
        if s.t <= 0:
            raise ValueError("the identity is singular at t = 0")
        lhs, rhs = chk.sides(s.F, s.t)
        g = mode.grid
        nl = g.norm(lhs)
        out.append({"t": s.t, "residual": g.norm(lhs - rhs) / nl if nl > 0 else g.norm(rhs),
                    "resolved": bool(resolution_ok(mode, s.t))})
    return out


def random_h10_fields(grid, n, rng, modes=24):
    """n random fields vanishing at both ends: sine series with coefficients ~ 1/m."""
    x = (grid.y - grid.lo) / (grid.hi - grid.lo)
    m = np.arange(1, modes + 1)
    S = np.sin(np.pi * np.outer(m, x))
    out = []
    for _ in range(n):
        c = (rng.normal(size=modes) + 1j * rng.normal(size=modes)) / m
        out.append(c @ S)
    return out

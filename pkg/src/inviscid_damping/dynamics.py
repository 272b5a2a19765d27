"""Time integration of one mode in scattered variables.

    dt F = ik B Psi,   -E_t Psi = F,   Psi = 0 at the walls,
with w = e^{-iktU} F.  Classical RK4; wall values of F are pinned because
Psi vanishes there.
"""

from dataclasses import dataclass, field

import numpy as np

from .elliptic import EllipticOp, solve_dirichlet, homogeneous_solution

BETA_TMIN = 0.1


@dataclass
class ModeState:
    k: int
    t: float
    F: np.ndarray
    grid: object

    def copy(self):
        return ModeState(self.k, self.t, self.F.copy(), self.grid)


@dataclass
class SimConfig:
    dt: float
    t_end: float
    operator: str = "Scattered"
    rhs: str = "standard"
    output_every: int = 1

    def validate(self, k, profile, grid):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.rhs not in ("standard", "beta", "propagator"):
            raise ValueError(f"unknown rhs variant {self.rhs!r}")
        if self.output_every < 1:
            raise ValueError("output_every must be >= 1")
        umax = np.max(np.abs(profile.dU(grid.y) * np.ones(len(grid))))
        if self.dt * abs(k) * umax > 0.5 + 1e-12:
            raise ValueError(f"dt*k*max|U'| = {self.dt * abs(k) * umax:.4g} exceeds 0.5")


def stable_dt(k, profile, grid, target, t_end=None):
    """Largest dt <= target with dt*k*max|U'| <= 0.5 (and, if given, dividing t_end)."""
    umax = np.max(np.abs(profile.dU(grid.y) * np.ones(len(grid))))
    dt = min(target, 0.5 / (abs(k) * umax))
    if t_end is not None:
        dt = t_end / np.ceil(t_end / dt - 1e-9)
    return dt


class Mode:
    """Precomputed coefficients for one wavenumber on one grid."""

    def __init__(self, profile, grid, k, md=None, variant=None):
        if k == 0:
            raise ValueError("k must be nonzero")
        self.profile, self.grid, self.k, self.md = profile, grid, int(k), md
        if variant is None:
            variant = "StarShift" if profile.star_shift else "Scattered"
        self.variant = variant
        s = profile.sample(grid.y)
        self.U, self.dU, self.d2U = s["U"], s["dU"], s["d2U"]
        self.B, self.dB = s["B"], s["dB"]
        self.op = EllipticOp(variant, self.k, profile, grid, 0.0, md)
        self.walls = (profile.domain.has_left_boundary, profile.domain.has_right_boundary)

    def phase(self, t):
        return np.exp(1j * self.k * t * self.U)

    def stream(self, F, t, variant=None):
        op = self.op if variant is None else EllipticOp(variant, self.k, self.profile, self.grid, 0.0, self.md)
        return solve_dirichlet(op.at(t), F)

    def stream_unscattered(self, F, t):
        return np.conj(self.phase(t)) * self.stream(F, t)

    def rhs(self, F, t, variant=None):
        if not np.any(self.B):
            return np.zeros_like(F, dtype=complex)
        return 1j * self.k * self.B * self.stream(F, t, variant)


def rhs_scattered(state, profile, partition=None, md=None, mode=None):
    mode = mode or Mode(profile, state.grid, state.k, md)
    return mode.rhs(state.F, state.t)


def _rk4(f, F, t, dt):
    k1 = f(F, t)
    k2 = f(F + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = f(F + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = f(F + dt * k3, t + dt)
    return F + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def step(state, cfg, mode, rhs=None):
    f = rhs or (lambda F, t: mode.rhs(F, t, None if cfg.operator == mode.variant else cfg.operator))
    F = _rk4(f, state.F, state.t, cfg.dt)
    if mode.walls[0]:
        F[0] = state.F[0]
    if mode.walls[1]:
        F[-1] = state.F[-1]
    if not np.all(np.isfinite(F)):
        err = FloatingPointError(f"non-finite F at t={state.t + cfg.dt:g}")
        err.state = state
        raise err
    return ModeState(state.k, state.t + cfg.dt, F, state.grid)


def _nsteps(t0, t1, dt):
    n = int(round((t1 - t0) / dt))
    if n < 0 or abs(n * dt - (t1 - t0)) > 1e-9 * max(1.0, abs(t1 - t0)):
        raise ValueError(f"dt={dt} does not divide [{t0}, {t1}]")
    return n


def integrate(state0, cfg, mode, callback=None):
    """Integrate to cfg.t_end; returns the states at the output cadence (first and last included)."""
    cfg.validate(state0.k, mode.profile, mode.grid)
    n = _nsteps(state0.t, cfg.t_end, cfg.dt)
    out = [state0.copy()]
    s = state0
    for i in range(1, n + 1):
        s = step(s, cfg, mode)
        s.t = state0.t + i * cfg.dt  # no drift from repeated addition
        if i % cfg.output_every == 0 or i == n:
            out.append(s.copy())
            if callback is not None:
                callback(s)
    return out


def unscatter(state, profile):
    U = profile.U(state.grid.y) * np.ones(len(state.grid))
    return np.exp(-1j * state.k * state.t * U) * state.F


def integrate_unscattered(omega0, k, t_end, dt, mode):
    """Reference integrator for dt w + ik U w = ik B psi in the original variables."""
    ik = 1j * mode.k

    def f(w, t):
        out = -ik * mode.U * w
        if np.any(mode.B):
            out = out + ik * mode.B * solve_dirichlet(EllipticOp("LaplaceK", mode.k, mode.profile, mode.grid), w)
        return out

    w, t = np.asarray(omega0, dtype=complex).copy(), 0.0
    for i in range(_nsteps(0.0, t_end, dt)):
        w = _rk4(f, w, t, dt)
        t = (i + 1) * dt
    return w


@dataclass
class BoundaryTrace:
    times: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def deviation(self):
        return float(max(np.max(np.abs(self.left - self.left[0])), np.max(np.abs(self.right - self.right[0]))))


def boundary_trace(series):
    t = np.array([s.t for s in series])
    return BoundaryTrace(t, np.array([s.F[0] for s in series]), np.array([s.F[-1] for s in series]))


# boundary-layer equations

@dataclass
class BetaState:
    side: str
    beta: np.ndarray
    omega_in: complex
    t: float


@dataclass
class BetaSeries:
    side: str
    omega_in: complex
    times: np.ndarray
    states: list
    trace: np.ndarray          # beta at the wall of its own side
    under_resolved: bool
    meta: dict = field(default_factory=dict)

    @property
    def norms(self):
        return np.array([np.sqrt(np.sum(self.meta["weights"] * np.abs(s.beta) ** 2)) for s in self.states])


class BetaSystem:
    """d/dt beta = ik B Psi1 + B d(a) <beta, e_a h_a/(t U' d)> e_a ht_a
                   - B d(b) <beta, e_b h_b/(t U' d)> e_b ht_b
                   + (w_in d / (t U'))|_side B e_side ht_side,
    with -M_t Psi1 = beta, e_s = e^{ikt(U - U(s))}, <f, g> = int f conj(g),
    and 1/t replaced by 1/max(t, 0.1).
    """

    def __init__(self, mode, side, omega_in):
        if side not in ("a", "b"):
            raise ValueError("side must be 'a' or 'b'")
        if not all(mode.walls):
            raise ValueError("boundary-layer equations need walls at both ends")
        if mode.md is None:
            raise ValueError("boundary-layer equations need the modified derivative")
        self.mode, self.side, self.omega_in = mode, side, complex(omega_in)
        op0 = EllipticOp("LaplaceK", mode.k, mode.profile, mode.grid, 0.0, mode.md)
        self.h = {s: homogeneous_solution(op0, s, "h").values for s in "ab"}
        self.ht = {s: homogeneous_solution(op0, s, "h_tilde").values for s in "ab"}
        self.op1 = EllipticOp("ModifiedH1", mode.k, mode.profile, mode.grid, 0.0, mode.md)
        d, U, dU = mode.md.d, mode.U, mode.dU
        self.Ua, self.Ub = U[0], U[-1]
        self.da, self.db = d[0], d[-1]
        self.w = mode.grid.weights
        self.src = (self.omega_in * (d / dU)[0 if side == "a" else -1])

    def rhs(self, beta, t):
        m = self.mode
        tau = max(t, BETA_TMIN)
        ea = np.exp(1j * m.k * t * (m.U - self.Ua))
        eb = np.exp(1j * m.k * t * (m.U - self.Ub))
        psi1 = solve_dirichlet(self.op1.at(t), beta)
        g = m.md.d * m.dU * tau
        ia = np.sum(self.w * beta * np.conj(ea) * self.h["a"] / g)
        ib = np.sum(self.w * beta * np.conj(eb) * self.h["b"] / g)
        out = 1j * m.k * m.B * psi1
        out += m.B * (self.da * ia * ea * self.ht["a"] - self.db * ib * eb * self.ht["b"])
        es, hs = (ea, self.ht["a"]) if self.side == "a" else (eb, self.ht["b"])
        out += (self.src / tau) * m.B * es * hs
        return out


def resolution_ok(mode, t):
    return mode.k * t * np.max(np.abs(mode.dU)) * mode.grid.h <= 0.5


def evolve_beta(side, profile, partition, omega_in_boundary, cfg, mode, t0=1.0):
    """Boundary-layer component beta_side on [0, cfg.t_end], recorded from t0 on."""
    cfg.validate(mode.k, profile, mode.grid)
    sysb = BetaSystem(mode, side, omega_in_boundary)
    n = _nsteps(0.0, cfg.t_end, cfg.dt)
    beta = np.zeros(len(mode.grid), dtype=complex)
    wall = 0 if side == "a" else -1
    states, times = [], []
    if omega_in_boundary == 0:
        rhs = lambda b, t: np.zeros_like(b)
    else:
        rhs = sysb.rhs
    for i in range(n + 1):
        t = i * cfg.dt
        if t >= t0 - 1e-12 and ((i - int(round(t0 / cfg.dt))) % cfg.output_every == 0 or i == n):
            states.append(BetaState(side, beta.copy(), complex(omega_in_boundary), t))
            times.append(t)
        if i == n:
            break
        beta = _rk4(rhs, beta, t, cfg.dt)
        if not np.all(np.isfinite(beta)):
            err = FloatingPointError(f"non-finite beta at t={t + cfg.dt:g}")
            err.state = BetaState(side, beta, omega_in_boundary, t)
            raise err
    meta = {"regularization": f"1/t -> 1/max(t, {BETA_TMIN}) on [0, 1]", "t0": t0,
            "weights": mode.grid.weights}
    return BetaSeries(side, complex(omega_in_boundary), np.array(times), states,
                      np.array([s.beta[wall] for s in states]), not resolution_ok(mode, cfg.t_end), meta)


def evolve_propagator(u0, t1, t2, profile, partition, cfg, mode, record=None):
    """S(t2, t1) u0 for dt u = ik B psi, -M2_t psi = u (second modified operator).

    record: optional list receiving (t, u, dt u) at every step.
    """
    if t2 < t1:
        raise ValueError("need t2 >= t1")
    op2 = EllipticOp("ModifiedH2", mode.k, profile, mode.grid, 0.0, mode.md)
    f = lambda u, t: 1j * mode.k * mode.B * solve_dirichlet(op2.at(t), u)
    n = _nsteps(t1, t2, cfg.dt) if t2 > t1 else 0
    u = np.asarray(u0, dtype=complex).copy()
    for i in range(n):
        t = t1 + i * cfg.dt
        if record is not None:
            record.append((t, u.copy(), f(u, t)))
        u = _rk4(f, u, t, cfg.dt)
    if record is not None:
        record.append((t2, u.copy(), f(u, t2)))
    return u

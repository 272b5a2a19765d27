"""One-dimensional Dirichlet problems for the stream functions.

Every operator here is written as -P with P one of

    LaplaceK    -k^2 + dyy
    Scattered   -k^2 + (dy - iktU')^2
    ModifiedH1  -k^2 + A^2 - 2 A (m .) + q          A = dy - iktU', m = d1/d, q = d2/d
    ModifiedH2  -k^2 + A^2 - 4 A (m .) - m^2 - 2 q
    StarShift   -k^2 + (A + 1)^2

so that solve_dirichlet returns psi with -P psi = rhs (for LaplaceK this is
(k^2 - dyy) psi = w).  All t-dependence enters through A, and
A(e^{iktU} g) = e^{iktU} g', so P_t = e^{iktU} P_0 e^{-iktU}: the solver only ever
discretizes the t = 0 operator and conjugates.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded, eigh_tridiagonal, LinAlgError

VARIANTS = ("LaplaceK", "Scattered", "ModifiedH1", "ModifiedH2", "StarShift")
HOMOGENEOUS = {"h": "LaplaceK", "h_tilde": "ModifiedH1", "h_tilde_tilde": "ModifiedH2", "h_star": "adjointH1"}


class EllipticSingularError(RuntimeError):
    def __init__(self, variant, t, detail=""):
        super().__init__(f"singular discrete system for {variant} at t={t:g} {detail}".rstrip())
        self.variant = variant
        self.t = t


@dataclass
class EllipticOp:
    variant: str
    k: int
    profile: object
    grid: object
    t: float = 0.0
    md: object = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown elliptic variant {self.variant!r}")
        if self.k == 0:
            raise ValueError("k must be nonzero")
        if self.variant in ("ModifiedH1", "ModifiedH2") and self.md is None:
            raise ValueError(f"{self.variant} needs a ModifiedDerivative")
        self.U = self.profile.U(self.grid.y) * np.ones(len(self.grid))
        self.dU = self.profile.dU(self.grid.y) * np.ones(len(self.grid))

    def at(self, t):
        return EllipticOp(self.variant, self.k, self.profile, self.grid, t, self.md)

    @property
    def gauged(self):
        return self.variant != "LaplaceK"

    def phase(self, t=None):
        t = self.t if t is None else t
        return np.exp(1j * self.k * t * self.U)

    def coefficients(self, kind=None):
        """(p, p2, r) of the t = 0 operator -psi'' + (p psi)' + p2 psi' + r psi."""
        kind = kind or self.variant
        n = len(self.grid)
        z = np.zeros(n)
        k2 = float(self.k) ** 2
        if kind in ("LaplaceK", "Scattered"):
            return z, z, np.full(n, k2)
        if kind == "StarShift":
            return z, np.full(n, -2.0), np.full(n, k2 - 1.0)
        m = self.md.d1 / self.md.d
        q = self.md.d2 / self.md.d
        if kind == "ModifiedH1":
            return 2 * m, z, k2 - q
        if kind == "ModifiedH2":
            return 4 * m, z, k2 + m * m + 2 * q
        if kind == "adjointH1":
            # formal adjoint of ModifiedH1: -k^2 + dyy + 2 m dy + q
            return z, -2 * m, k2 - q
        raise ValueError(kind)


def _bands(op, kind, i0, i1):
    """Tridiagonal bands of the t = 0 operator on interior nodes i0+1 .. i1-1."""
    p, p2, r = op.coefficients(kind)
    h = op.grid.h
    i = np.arange(i0 + 1, i1)
    lower = -1 / h**2 - p[i - 1] / (2 * h) - p2[i] / (2 * h)
    diag = 2 / h**2 + r[i]
    upper = -1 / h**2 + p[i + 1] / (2 * h) + p2[i] / (2 * h)
    return lower, diag, upper


def _solve_range(op, rhs, i0, i1, va=0.0, vb=0.0, kind=None, t=0.0):
    kind = kind or ("LaplaceK" if op.variant == "Scattered" else op.variant)
    lower, diag, upper = _bands(op, kind, i0, i1)
    b = np.array(rhs[i0 + 1:i1], dtype=complex)
    b[0] -= lower[0] * va
    b[-1] -= upper[-1] * vb
    ab = np.zeros((3, diag.size), dtype=float)
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    try:
        x = solve_banded((1, 1), ab, b, check_finite=False)
    except (LinAlgError, ValueError) as e:
        raise EllipticSingularError(op.variant, t, str(e)) from None
    if not np.all(np.isfinite(x)):
        raise EllipticSingularError(op.variant, t, "(non-finite solution)")
    out = np.zeros(len(op.grid), dtype=complex)
    out[i0] = va
    out[i1] = vb
    out[i0 + 1:i1] = x
    return out


def apply_operator(op, psi, kind=None):
    """-P_t psi at interior nodes (zero at the walls), same stencil as the solver."""
    kind = kind or ("LaplaceK" if op.variant == "Scattered" else op.variant)
    ph = op.phase() if op.gauged else 1.0
    f = np.conj(ph) * psi if op.gauged else np.asarray(psi, dtype=complex)
    lower, diag, upper = _bands(op, kind, 0, op.grid.N)
    out = np.zeros(len(op.grid), dtype=complex)
    out[1:-1] = lower * f[:-2] + diag * f[1:-1] + upper * f[2:]
    return ph * out if op.gauged else out


def solve_dirichlet(op, rhs):
    """psi with -P_t psi = rhs and psi = 0 at both ends of the grid."""
    op.grid.check(rhs)
    if op.gauged:
        ph = op.phase()
        return ph * _solve_range(op, np.conj(ph) * rhs, 0, op.grid.N, t=op.t)
    return _solve_range(op, rhs, 0, op.grid.N, t=op.t)


def residual(op, psi, rhs):
    r = apply_operator(op, psi) - rhs
    r[0] = r[-1] = 0.0
    return op.grid.norm(r)


def coercivity_margin(op, kind=None):
    """Smallest eigenvalue of the symmetric part of the discrete -P_0."""
    kind = kind or ("LaplaceK" if op.variant == "Scattered" else op.variant)
    lower, diag, upper = _bands(op, kind, 0, op.grid.N)
    off = 0.5 * (upper[:-1] + lower[1:])
    return float(eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, 0))[0])


def near_singular(op, threshold=0.1):
    """Flag operators whose coercivity margin is below threshold * k^2."""
    return coercivity_margin(op) < threshold * float(op.k) ** 2


@dataclass
class HomogeneousPair:
    side: str
    variant: str
    values: np.ndarray
    residual: float

    def scattered(self, k, t, U, U_side):
        """e^{ikt(U - U(side))} h."""
        return np.exp(1j * k * t * (U - U_side)) * self.values


def homogeneous_solution(op0, side, variant="h"):
    if variant not in HOMOGENEOUS:
        raise ValueError(f"unknown homogeneous variant {variant!r}")
    if side not in ("a", "b"):
        raise ValueError("side must be 'a' or 'b'")
    kind = HOMOGENEOUS[variant]
    if kind != "LaplaceK" and op0.md is None:
        raise ValueError(f"{variant} needs a ModifiedDerivative")
    va, vb = (1.0, 0.0) if side == "a" else (0.0, 1.0)
    n = len(op0.grid)
    h = _solve_range(op0, np.zeros(n), 0, op0.grid.N, va, vb, kind=kind)
    lower, diag, upper = _bands(op0, kind, 0, op0.grid.N)
    res = lower * h[:-2] + diag * h[1:-1] + upper * h[2:]
    return HomogeneousPair(side, variant, h.real.copy(), float(np.sqrt(op0.grid.h * np.sum(np.abs(res) ** 2))))


def h1t_energy(grid, dU, k, psi0, weight=True):
    """int |U'| (k^2 |psi|^2 + |psi'|^2) for an unscattered field psi0."""
    w = np.abs(dU) if weight else 1.0
    return float(grid.integrate(w * (k * k * np.abs(psi0) ** 2 + np.abs(grid.ddy(psi0)) ** 2)))


def weighted_coercivity_check(op, g):
    """<-|U'| g, Delta_k g> / int |U'| |grad_k g|^2 for g vanishing at the walls."""
    if op.variant not in ("LaplaceK", "Scattered"):
        raise ValueError("coercivity check is for LaplaceK or Scattered")
    g = np.asarray(g, dtype=complex)
    if op.variant == "Scattered":
        g = np.conj(op.phase()) * g
    grid, k = op.grid, op.k
    w = np.abs(op.dU)
    g = g.copy()
    g[0] = g[-1] = 0
    lap = np.zeros_like(g)
    lap[1:-1] = k * k * g[1:-1] - (g[2:] - 2 * g[1:-1] + g[:-2]) / grid.h**2
    num = np.real(np.sum(grid.weights * w * np.conj(g) * lap))
    mid = grid.y[:-1] + 0.5 * grid.h
    wm = np.abs(op.profile.dU(mid) * np.ones_like(mid))
    den = np.sum(grid.weights * w * k * k * np.abs(g) ** 2) + np.sum(wm * np.abs(np.diff(g)) ** 2) / grid.h
    if den == 0:
        raise ZeroDivisionError("g vanishes identically")
    return float(num / den)


def localized_solve(partition, rhs, op, weights=None, bases=None):
    """Local potentials: -P psi_j = chi_j rhs on I_j with zero data on the ends of I_j.

    With weights and bases, the data is A_j chi_j rhs instead.
    """
    grid = op.grid
    out = []
    for j, (a, b) in enumerate(partition.intervals):
        local = partition.chi[j] * rhs
        if weights is not None:
            from .multipliers import expand, synthesize
            local = synthesize(weights[j] * expand(rhs, bases[j], partition), bases[j], op.grid)
        i0 = int(np.ceil((a - grid.lo) / grid.h - 1e-9))
        i1 = int(np.floor((b - grid.lo) / grid.h + 1e-9))
        if op.gauged:
            ph = op.phase()
            psi = ph * _solve_range(op, np.conj(ph) * local, i0, i1, t=op.t)
        else:
            psi = _solve_range(op, local, i0, i1)
        out.append(psi)
    return out


def comparison_check(mod_op, base_op, g):
    if mod_op.variant not in ("ModifiedH1", "ModifiedH2"):
        raise ValueError("mod_op must be ModifiedH1 or ModifiedH2")
    if mod_op.k != base_op.k or mod_op.t != base_op.t:
        raise ValueError("operators must share k and t")
    psi = solve_dirichlet(mod_op, g)
    base = solve_dirichlet(base_op, g)
    ph = np.conj(base_op.phase()) if base_op.gauged else 1.0
    eb = h1t_energy(base_op.grid, base_op.dU, base_op.k, ph * base)
    if eb == 0:
        raise ZeroDivisionError("base solution vanishes")
    em = h1t_energy(mod_op.grid, mod_op.dU, mod_op.k, np.conj(mod_op.phase()) * psi)
    return em / eb

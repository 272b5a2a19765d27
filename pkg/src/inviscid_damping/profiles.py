"""Shear and circular base flows with closed-form coefficient functions.

A shear flow is U(y) e_1 with the coefficient B(y) of the linearized equation
    dt w + ik U w = ik B psi,   -(-k^2 + dyy) psi = w.
For a shear flow B = U''.  The exponential family lets B be an independent small
perturbation so that the smallness conditions can be dialled in directly.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

SHEAR_NAMES = ("couette", "exponential", "monomial")
CIRCULAR_NAMES = ("taylor_couette", "point_vortex", "power_law")


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    has_left_boundary: Optional[bool] = None
    has_right_boundary: Optional[bool] = None

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")
        # default: a finite endpoint is a wall
        if self.has_left_boundary is None:
            object.__setattr__(self, "has_left_boundary", bool(np.isfinite(self.lo)))
        if self.has_right_boundary is None:
            object.__setattr__(self, "has_right_boundary", bool(np.isfinite(self.hi)))
        if self.has_left_boundary and not np.isfinite(self.lo):
            raise ValueError("a wall needs a finite endpoint")
        if self.has_right_boundary and not np.isfinite(self.hi):
            raise ValueError("a wall needs a finite endpoint")

    @property
    def bounded(self):
        return bool(np.isfinite(self.lo) and np.isfinite(self.hi))

    @property
    def length(self):
        return self.hi - self.lo


def _zero(y):
    return np.zeros_like(np.asarray(y, dtype=float))


@dataclass(frozen=True)
class FlowProfile:
    domain: Interval
    U: Callable
    dU: Callable
    d2U: Callable
    d3U: Callable
    B: Callable
    dB: Callable
    label: str
    star_shift: bool = False
    params: tuple = ()
    truncation: Optional[tuple] = None
    origin: str = "shear"

    def sample(self, y):
        y = np.asarray(y, dtype=float)
        return {name: np.broadcast_to(getattr(self, name)(y), y.shape).astype(float)
                for name in ("U", "dU", "d2U", "d3U", "B", "dB")}


@dataclass(frozen=True)
class CircularProfile:
    name: str
    params: tuple
    r1: float
    r2: float
    u: Callable
    du: Callable
    d2u: Callable
    d3u: Callable

    @property
    def label(self):
        return f"{self.name}{list(self.params)}"


def make_shear_profile(name, params=(), domain=None):
    params = tuple(float(p) for p in params)
    if domain is None:
        domain = Interval(0.0, 1.0)
    elif not isinstance(domain, Interval):
        domain = Interval(*domain)

    if name == "couette":
        if params:
            raise ValueError("couette takes no parameters")
        return FlowProfile(domain, lambda y: np.asarray(y, dtype=float) * 1.0,
                           lambda y: np.ones_like(np.asarray(y, dtype=float)),
                           _zero, _zero, _zero, _zero, "couette", params=params)

    if name == "exponential":
        if len(params) not in (1, 2):
            raise ValueError("exponential takes [alpha] or [alpha, eps_B]")
        a = params[0]
        eb = params[1] if len(params) == 2 else 0.0
        if a == 0:
            raise ValueError("exponential needs alpha != 0")
        e = lambda y: np.exp(a * np.asarray(y, dtype=float))
        return FlowProfile(domain, e,
                           lambda y: a * e(y), lambda y: a**2 * e(y), lambda y: a**3 * e(y),
                           lambda y: eb * e(y), lambda y: eb * a * e(y),
                           f"exponential[alpha={a:g}, eps_B={eb:g}]", params=(a, eb))

    if name == "monomial":
        if len(params) not in (1, 2):
            raise ValueError("monomial takes [p] or [p, eps_B]")
        p = params[0]
        eb = params[1] if len(params) == 2 else 0.0
        if p == 0:
            raise ValueError("monomial with p = 0 has U' = 0 everywhere")
        integer = float(p).is_integer()
        if not integer and domain.lo < 0:
            raise ValueError(f"monomial with non-integer p={p:g} needs y >= 0")
        if p != 1 and domain.lo < 0 < domain.hi:
            raise ValueError(f"monomial p={p:g}: U'(y) = {p:g} y^{p - 1:g} vanishes at y=0 inside the domain")

        def mono(c, q):
            return lambda y: c * np.power(np.asarray(y, dtype=float), q)

        return FlowProfile(domain, mono(1.0, p), mono(p, p - 1), mono(p * (p - 1), p - 2),
                           mono(p * (p - 1) * (p - 2), p - 3), mono(eb, p), mono(eb * p, p - 1),
                           f"monomial[p={p:g}, eps_B={eb:g}]", params=(p, eb))

    raise ValueError(f"unknown shear profile {name!r}")


def make_circular_profile(name, params, domain):
    params = tuple(float(p) for p in params)
    r1, r2 = (float(r) for r in domain)
    if not (0 <= r1 < r2) or r2 <= 0:
        raise ValueError(f"radial domain must satisfy 0 <= r1 < r2, got ({r1}, {r2})")
    if r1 == 0 and name != "power_law":
        # u blows up at r = 0 for the r^-2 family; the open domain is still fine
        pass

    if name in ("taylor_couette", "point_vortex"):
        if name == "point_vortex":
            if len(params) != 1:
                raise ValueError("point_vortex takes [C2]")
            c1, c2 = 0.0, params[0]
        else:
            if len(params) != 2:
                raise ValueError("taylor_couette takes [C1, C2]")
            c1, c2 = params
        r = lambda x: np.asarray(x, dtype=float)
        return CircularProfile(name, params, r1, r2,
                               lambda x: c1 + c2 * r(x) ** -2.0,
                               lambda x: -2.0 * c2 * r(x) ** -3.0,
                               lambda x: 6.0 * c2 * r(x) ** -4.0,
                               lambda x: -24.0 * c2 * r(x) ** -5.0)

    if name == "power_law":
        if len(params) != 2:
            raise ValueError("power_law takes [alpha, A]")
        a, A = params
        r = lambda x: np.asarray(x, dtype=float)
        return CircularProfile(name, params, r1, r2,
                               lambda x: A * r(x) ** a,
                               lambda x: A * a * r(x) ** (a - 1),
                               lambda x: A * a * (a - 1) * r(x) ** (a - 2),
                               lambda x: A * a * (a - 1) * (a - 2) * r(x) ** (a - 3))

    raise ValueError(f"unknown circular profile {name!r}")


def to_log_polar(cp, star=False):
    """Shear-type coefficients in s = log r.

    With r = e^s:  U = u(r),  U' = r u',  U'' = r u' + r^2 u'',
    U''' = r u' + 3 r^2 u'' + r^3 u'''.  The vorticity coefficient
    B = d/ds(e^{-2s} d/ds(e^{2s} U)) = 2U' + U''.
    """
    lo = np.log(cp.r1) if cp.r1 > 0 else -np.inf
    hi = np.log(cp.r2) if np.isfinite(cp.r2) else np.inf
    dom = Interval(lo, hi, bool(cp.r1 > 0), bool(np.isfinite(cp.r2)))
    u, du, d2u, d3u = cp.u, cp.du, cp.d2u, cp.d3u

    def U(s):
        return np.broadcast_to(u(np.exp(s)), np.shape(s)) * 1.0

    def dU(s):
        r = np.exp(s)
        return r * du(r)

    def d2U(s):
        r = np.exp(s)
        return r * du(r) + r * r * d2u(r)

    def d3U(s):
        r = np.exp(s)
        return r * du(r) + 3 * r * r * d2u(r) + r**3 * d3u(r)

    def B(s):
        r = np.exp(s)
        return 3 * r * du(r) + r * r * d2u(r)

    def dB(s):
        r = np.exp(s)
        return 3 * r * du(r) + 5 * r * r * d2u(r) + r**3 * d3u(r)

    return FlowProfile(dom, U, dU, d2U, d3U, B, dB, f"log-polar {cp.label}",
                       star_shift=bool(star), params=cp.params, origin="circular")


def truncate_domain(p, lo, hi):
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError(f"empty truncation ({lo}, {hi})")
    if lo < p.domain.lo or hi > p.domain.hi:
        raise ValueError(f"({lo}, {hi}) is not inside ({p.domain.lo}, {p.domain.hi})")
    return replace(p, domain=Interval(lo, hi, True, True),
                   truncation=(p.domain.lo, p.domain.hi, lo, hi))

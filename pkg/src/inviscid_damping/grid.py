import numpy as np


class Grid:
    """Uniform grid with N cells on [lo, hi] (N + 1 nodes, walls included)."""

    def __init__(self, lo, hi, N):
        if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
            raise ValueError(f"grid needs a finite interval, got ({lo}, {hi})")
        if N < 4:
            raise ValueError("grid needs at least 4 cells")
        self.lo = float(lo)
        self.hi = float(hi)
        self.N = int(N)
        self.y = np.linspace(self.lo, self.hi, self.N + 1)
        self.h = (self.hi - self.lo) / self.N
        w = np.full(self.N + 1, self.h)
        w[0] = w[-1] = 0.5 * self.h
        self.weights = w

    def __len__(self):
        return self.N + 1

    def __eq__(self, other):
        return isinstance(other, Grid) and (self.lo, self.hi, self.N) == (other.lo, other.hi, other.N)

    def __hash__(self):
        return hash((self.lo, self.hi, self.N))

    def __repr__(self):
        return f"Grid({self.lo}, {self.hi}, N={self.N})"

    def integrate(self, f):
        return np.dot(self.weights, f)

    def norm(self, f):
        return float(np.sqrt(self.integrate(np.abs(f) ** 2)))

    def ddy(self, f):
        # central in the interior, one-sided second order at the ends
        f = np.asarray(f)
        g = np.empty_like(f)
        h = self.h
        g[1:-1] = (f[2:] - f[:-2]) / (2 * h)
        g[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
        g[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
        return g

    def d2dy2(self, f):
        f = np.asarray(f)
        g = np.empty_like(f)
        h2 = self.h ** 2
        g[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h2
        g[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h2
        g[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h2
        return g

    def check(self, f):
        if np.shape(f)[-1] != self.N + 1:
            raise ValueError(f"field has {np.shape(f)[-1]} samples, grid has {self.N + 1}")

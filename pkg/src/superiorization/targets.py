"""Target functions with nonascending-direction oracles.

For a convex target the direction is built from the partial derivatives that
exist at the query point (the others are taken as zero) and normalized:
``v = -u / ||u||``, or ``v = 0`` when ``u = 0``.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "Target",
    "SquaredNorm",
    "LinearForm",
    "ZeroTarget",
    "TVGrid",
    "FixedDirection",
    "negated_coordinate",
]


def _normalized_descent(u: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(u))
    if norm == 0.0 or not np.isfinite(norm):
        return np.zeros_like(u)
    return -u / norm


class Target:
    """Evaluable convex function with a nonascending-direction oracle."""

    dim: int | None = None

    def __call__(self, x) -> float:
        return self.evaluate(x)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise ValueError(f"expected a 1-D vector, got shape {x.shape}")
        if self.dim is not None and x.shape[0] != self.dim:
            raise ValueError(f"dimension mismatch: expected {self.dim}, got {x.shape[0]}")
        return x

    def evaluate(self, x) -> float:
        raise NotImplementedError

    def partials(self, x) -> np.ndarray:
        """Partial derivatives where they exist, zero elsewhere."""
        raise NotImplementedError

    def nonascending(self, x) -> np.ndarray:
        return _normalized_descent(self.partials(x))

    @property
    def is_zero(self) -> bool:
        return False


class SquaredNorm(Target):
    """``scale * ||x||^2`` (``scale=0.5`` gives the half squared norm)."""

    def __init__(self, scale: float = 0.5, dim: int | None = None):
        self.scale = float(scale)
        self.dim = dim

    def evaluate(self, x) -> float:
        x = self._check(x)
        return self.scale * float(x @ x)

    def partials(self, x) -> np.ndarray:
        return 2.0 * self.scale * self._check(x)


class LinearForm(Target):
    """``<a, x>``."""

    def __init__(self, a):
        self.a = np.array(a, dtype=float)
        self.dim = self.a.shape[0]

    def evaluate(self, x) -> float:
        return float(self.a @ self._check(x))

    def partials(self, x) -> np.ndarray:
        self._check(x)
        return self.a.copy()


def negated_coordinate(i: int, dim: int) -> LinearForm:
    """``-x_i`` on R^dim."""
    a = np.zeros(dim)
    a[i] = -1.0
    return LinearForm(a)


class ZeroTarget(Target):
    """``phi = 0``; the direction is always the zero vector."""

    def __init__(self, dim: int | None = None):
        self.dim = dim

    def evaluate(self, x) -> float:
        self._check(x)
        return 0.0

    def partials(self, x) -> np.ndarray:
        return np.zeros_like(self._check(x))

    @property
    def is_zero(self) -> bool:
        return True


class FixedDirection(Target):
    """Wrap a target but always return a user-supplied direction."""

    def __init__(self, target: Target, direction):
        self.target = target
        self.direction = np.array(direction, dtype=float)
        self.dim = self.direction.shape[0]
        if np.linalg.norm(self.direction) > 1.0 + 1e-12:
            raise ValueError("a fixed direction must have norm at most 1")

    def evaluate(self, x) -> float:
        return self.target.evaluate(self._check(x))

    def partials(self, x) -> np.ndarray:
        return self.target.partials(self._check(x))

    def nonascending(self, x) -> np.ndarray:
        self._check(x)
        return self.direction.copy()


class TVGrid(Target):
    """Total variation of pixel values on a (possibly masked) 2-D grid.

    For pixel ``(s, t)`` let ``d = z[s,t] - z[s+1,t]`` and ``r = z[s,t] -
    z[s,t+1]``.  The pixel contributes ``sqrt(d**2 + r**2)`` when both
    neighbors exist, ``|d|`` or ``|r|`` when only one does, and nothing
    otherwise.  On a full ``M x M`` grid this is the usual isotropic TV with
    one-sided differences on the last row and column.

    With a ``mask`` the vector holds only the masked pixels, in row-major
    order, and only neighbors inside the mask count.
    """

    def __init__(self, M: int | None = None, mask=None, nondiff_tol: float = 1e-12):
        if mask is None:
            if M is None or M < 1:
                raise ValueError("TVGrid needs a side length M or a mask")
            mask = np.ones((M, M), dtype=bool)
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim != 2:
            raise ValueError("mask must be 2-D")
        self.mask = mask
        self.shape = mask.shape
        self.dim = int(mask.sum())
        self.nondiff_tol = nondiff_tol

        index = np.full(mask.shape, -1, dtype=np.int64)
        index[mask] = np.arange(self.dim)
        self.index = index
        down = np.full(mask.shape, -1, dtype=np.int64)
        down[:-1, :] = index[1:, :]
        right = np.full(mask.shape, -1, dtype=np.int64)
        right[:, :-1] = index[:, 1:]
        own, down, right = index[mask], down[mask], right[mask]
        has_d, has_r = down >= 0, right >= 0
        both = has_d & has_r
        self._both = (own[both], down[both], right[both])
        self._down = (own[has_d & ~has_r], down[has_d & ~has_r])
        self._right = (own[has_r & ~has_d], right[has_r & ~has_d])

    def to_grid(self, z, fill: float = np.nan) -> np.ndarray:
        grid = np.full(self.shape, fill)
        grid[self.mask] = self._check(z)
        return grid

    def evaluate(self, z) -> float:
        z = self._check(z)
        p, d, r = self._both
        total = np.sqrt((z[p] - z[d]) ** 2 + (z[p] - z[r]) ** 2).sum()
        p, d = self._down
        total += np.abs(z[p] - z[d]).sum()
        p, r = self._right
        total += np.abs(z[p] - z[r]).sum()
        return float(total)

    def partials(self, z) -> np.ndarray:
        z = self._check(z)
        n = self.dim
        tol = self.nondiff_tol * (1.0 + (float(np.abs(z).max()) if n else 0.0))
        grad = np.zeros(n)
        kink = np.zeros(n, dtype=bool)

        p, d, r = self._both
        dd, dr = z[p] - z[d], z[p] - z[r]
        mag = np.sqrt(dd**2 + dr**2)
        bad = mag < tol
        safe = np.where(bad, 1.0, mag)
        gd, gr = np.where(bad, 0.0, dd / safe), np.where(bad, 0.0, dr / safe)
        grad += np.bincount(p, gd + gr, n) - np.bincount(d, gd, n) - np.bincount(r, gr, n)
        for idx in (p, d, r):
            kink[idx[bad]] = True

        for p, q in (self._down, self._right):
            diff = z[p] - z[q]
            bad = np.abs(diff) < tol
            sgn = np.where(bad, 0.0, np.sign(diff))
            grad += np.bincount(p, sgn, n) - np.bincount(q, sgn, n)
            kink[p[bad]] = True
            kink[q[bad]] = True

        # a partial that involves a kink does not exist: take it as zero
        grad[kink] = 0.0
        return grad

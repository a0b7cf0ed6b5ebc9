"""Closed convex sets with exact orthogonal projections.

Every set exposes ``project(x)``, ``distance(x)`` and ``contains(x)``.  Sets are
immutable after construction; projections return new arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .exceptions import ConfigurationError

__all__ = [
    "ConvexSet",
    "FullSpace",
    "HalfSpace",
    "Box",
    "Ball",
    "LabeledIntervalSet",
    "AffineGraphProjector",
    "ProductSet",
    "distance",
    "feasibility_tolerance",
]


def feasibility_tolerance(x) -> float:
    return 1e-9 * (1.0 + float(np.linalg.norm(x)))


def _as_vector(x, dim: int | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {x.shape}")
    if dim is not None and x.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {x.shape[0]}")
    return x


class ConvexSet:
    """Base class.  Subclasses implement ``dim`` and ``project``."""

    dim: int

    def project(self, x) -> np.ndarray:
        raise NotImplementedError

    def distance(self, x) -> float:
        x = _as_vector(x, self.dim)
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x, tol: float | None = None) -> bool:
        if tol is None:
            tol = feasibility_tolerance(x)
        return self.distance(x) <= tol


def distance(cset: ConvexSet, x) -> float:
    """Euclidean distance from ``x`` to ``cset``."""
    return cset.distance(x)


@dataclass(frozen=True)
class FullSpace(ConvexSet):
    """The whole space R^dim; projection is the identity."""

    dim: int

    def project(self, x) -> np.ndarray:
        return _as_vector(x, self.dim).copy()


@dataclass(frozen=True, eq=False)
class HalfSpace(ConvexSet):
    """``{x : <normal, x> <= offset}``."""

    normal: np.ndarray
    offset: float
    _sqnorm: float = field(init=False, repr=False)

    def __post_init__(self):
        normal = _as_vector(self.normal).copy()
        if not np.all(np.isfinite(normal)) or not np.isfinite(self.offset):
            raise ConfigurationError("half-space data must be finite")
        sq = float(normal @ normal)
        if sq == 0.0:
            raise ConfigurationError("half-space normal must be nonzero")
        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "_sqnorm", sq)

    @classmethod
    def geq(cls, normal, offset) -> "HalfSpace":
        """``{x : <normal, x> >= offset}``."""
        return cls(-np.asarray(normal, dtype=float), -float(offset))

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def project(self, x) -> np.ndarray:
        x = _as_vector(x, self.dim)
        excess = float(self.normal @ x) - self.offset
        if excess <= 0.0:
            return x.copy()
        return x - (excess / self._sqnorm) * self.normal


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    """Coordinate-wise bounds; ``-inf``/``inf`` allowed."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.array(self.lower, dtype=float, ndmin=1)
        upper = np.array(self.upper, dtype=float, ndmin=1)
        lower, upper = np.broadcast_arrays(lower, upper)
        lower, upper = lower.copy(), upper.copy()
        if lower.ndim != 1:
            raise ConfigurationError("box bounds must be vectors")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)) or np.any(lower > upper):
            raise ConfigurationError("box requires lower <= upper in every coordinate")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def uniform(cls, dim: int, lower: float = -np.inf, upper: float = np.inf) -> "Box":
        return cls(np.full(dim, lower), np.full(dim, upper))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def project(self, x) -> np.ndarray:
        x = _as_vector(x, self.dim)
        return np.minimum(np.maximum(x, self.lower), self.upper)


@dataclass(frozen=True, eq=False)
class Ball(ConvexSet):
    """Closed Euclidean ball."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = _as_vector(self.center).copy()
        if not self.radius > 0 or not np.isfinite(self.radius):
            raise ConfigurationError("ball radius must be positive and finite")
        center.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def project(self, x) -> np.ndarray:
        x = _as_vector(x, self.dim)
        d = x - self.center
        r = float(np.linalg.norm(d))
        if r <= self.radius:
            return x.copy()
        return self.center + (self.radius / r) * d


class LabeledIntervalSet(ConvexSet):
    """Per-coordinate intervals selected by an integer label.

    ``labels[i]`` picks the interval ``intervals[labels[i]]`` for coordinate
    ``i``; e.g. label 0 for organ-at-risk pixels and ``l`` for tumor ``l``.
    """

    def __init__(self, labels: Sequence[int], intervals: Mapping[int, tuple[float, float]]):
        labels = np.asarray(labels)
        if labels.ndim != 1 or not np.issubdtype(labels.dtype, np.integer):
            raise ConfigurationError("labels must be a 1-D integer array")
        missing = set(np.unique(labels).tolist()) - set(intervals)
        if missing:
            raise ConfigurationError(f"no interval for labels {sorted(missing)}")
        for key, (lo, hi) in intervals.items():
            if not lo <= hi:
                raise ConfigurationError(f"interval for label {key} has lo > hi")
        self.labels = labels.copy()
        self.intervals = {int(k): (float(lo), float(hi)) for k, (lo, hi) in intervals.items()}
        self._box = Box(
            [self.intervals[int(k)][0] for k in labels],
            [self.intervals[int(k)][1] for k in labels],
        )
        self.labels.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.labels.shape[0]

    @property
    def lower(self) -> np.ndarray:
        return self._box.lower

    @property
    def upper(self) -> np.ndarray:
        return self._box.upper

    def project(self, x) -> np.ndarray:
        return self._box.project(x)


class AffineGraphProjector(ConvexSet):
    """Projection onto ``V = {(x, y) : A x = y}`` in R^(n+m).

    With ``Z = [A, -I]`` the set is the null space of ``Z`` and

        P_V(z) = z - Z^T (Z Z^T)^{-1} Z z,   Z Z^T = A A^T + I.

    The Cholesky factor of ``A A^T + I`` is computed once.
    """

    def __init__(self, A):
        A = np.array(A, dtype=float, ndmin=2)
        if A.ndim != 2:
            raise ConfigurationError("A must be a matrix")
        if not np.all(np.isfinite(A)):
            raise ConfigurationError("A has non-finite entries")
        self.A = A
        self.A.setflags(write=False)
        self.m, self.n = A.shape
        self.gram = A @ A.T + np.eye(self.m)
        self._factor = cho_factor(self.gram, lower=True)

    @property
    def dim(self) -> int:
        return self.n + self.m

    def split(self, z) -> tuple[np.ndarray, np.ndarray]:
        z = _as_vector(z, self.dim)
        return z[: self.n], z[self.n :]

    def project(self, z) -> np.ndarray:
        x, y = self.split(z)
        w = cho_solve(self._factor, self.A @ x - y)
        return np.concatenate([x - self.A.T @ w, y + w])

    def residual(self, z) -> float:
        x, y = self.split(z)
        return float(np.linalg.norm(self.A @ x - y))


class ProductSet(ConvexSet):
    """Cartesian product of sets acting on disjoint coordinate ranges."""

    def __init__(self, factors: Sequence[tuple[ConvexSet, slice]], dim: int | None = None):
        spans = []
        for cset, sl in factors:
            start, stop, step = sl.start or 0, sl.stop, sl.step or 1
            if stop is None or step != 1:
                raise ConfigurationError("factor ranges must be explicit contiguous slices")
            if stop - start != cset.dim:
                raise ConfigurationError(
                    f"factor of dimension {cset.dim} assigned {stop - start} coordinates"
                )
            spans.append((start, stop))
        total = max((s[1] for s in spans), default=0) if dim is None else dim
        covered = np.zeros(total, dtype=int)
        for start, stop in spans:
            if stop > total:
                raise ConfigurationError("factor range exceeds product dimension")
            covered[start:stop] += 1
        if np.any(covered != 1):
            raise ConfigurationError("factor ranges must partition the coordinates")
        self.factors = [(cset, slice(a, b)) for (cset, _), (a, b) in zip(factors, spans)]
        self._dim = total

    @classmethod
    def stack(cls, *sets: ConvexSet) -> "ProductSet":
        factors, start = [], 0
        for cset in sets:
            factors.append((cset, slice(start, start + cset.dim)))
            start += cset.dim
        return cls(factors)

    @property
    def dim(self) -> int:
        return self._dim

    def project(self, z) -> np.ndarray:
        z = _as_vector(z, self.dim)
        out = np.empty_like(z)
        for cset, sl in self.factors:
            out[sl] = cset.project(z[sl])
        return out

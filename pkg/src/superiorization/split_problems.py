"""Split minimization problems with subvectors and their product-space operator."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .convex_sets import AffineGraphProjector, ConvexSet, FullSpace
from .exceptions import ConfigurationError
from .targets import Target, ZeroTarget

__all__ = ["SplitProblem", "MSSFPOperator", "assemble_perturbation", "block_slices"]


def block_slices(partition: Sequence[int]) -> list[slice]:
    """Contiguous coordinate ranges of the subvectors ``y^1, ..., y^B``."""
    out, start = [], 0
    for size in partition:
        if int(size) != size or size < 1:
            raise ConfigurationError(f"block sizes must be positive integers, got {partition}")
        out.append(slice(start, start + int(size)))
        start += int(size)
    return out


@dataclass(eq=False)
class SplitProblem:
    """Data of a split minimization problem with subvectors in the y-space.

    ``A`` is m x n and split by rows into blocks of sizes ``partition``;
    ``x_sets`` and ``y_sets`` are the families whose intersections are C and
    Q.  ``x_target`` acts on x, ``block_targets[b]`` on ``y^b = A_b x``.
    """

    A: np.ndarray
    x_sets: Sequence[ConvexSet]
    y_sets: Sequence[ConvexSet]
    partition: Sequence[int] | None = None
    x_target: Target | None = None
    block_targets: Sequence[Target] | None = None
    projector: AffineGraphProjector = field(init=False, repr=False)

    def __post_init__(self):
        self.A = np.array(self.A, dtype=float, ndmin=2)
        m, n = self.A.shape
        if self.partition is None:
            self.partition = (m,)
        self.partition = tuple(int(s) for s in self.partition)
        if sum(self.partition) != m:
            raise ConfigurationError(f"block partition {self.partition} does not sum to m={m}")
        self.x_sets = list(self.x_sets) or [FullSpace(n)]
        self.y_sets = list(self.y_sets) or [FullSpace(m)]
        for s in self.x_sets:
            if s.dim != n:
                raise ConfigurationError(f"x-space set of dimension {s.dim}, expected {n}")
        for s in self.y_sets:
            if s.dim != m:
                raise ConfigurationError(f"y-space set of dimension {s.dim}, expected {m}")
        if self.x_target is None:
            self.x_target = ZeroTarget(n)
        if self.block_targets is None:
            self.block_targets = [ZeroTarget(size) for size in self.partition]
        self.block_targets = list(self.block_targets)
        if len(self.block_targets) != len(self.partition):
            raise ConfigurationError("one target per y-block is required")
        for t, size in zip(self.block_targets, self.partition):
            if t.dim is not None and t.dim != size:
                raise ConfigurationError(f"block target of dimension {t.dim} for a block of {size}")
        if self.x_target.dim is not None and self.x_target.dim != n:
            raise ConfigurationError("x-target dimension does not match n")
        self.projector = AffineGraphProjector(self.A)

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def blocks(self) -> list[slice]:
        return block_slices(self.partition)

    def block_matrix(self, b: int) -> np.ndarray:
        """Row block ``A_b`` (a view, not a copy)."""
        return self.A[self.blocks[b]]

    def block_image(self, x) -> list[np.ndarray]:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"dimension mismatch: expected {self.n}, got {x.shape}")
        y = self.A @ x
        return [y[sl] for sl in self.blocks]

    def split(self, z) -> tuple[np.ndarray, np.ndarray]:
        return z[: self.n], z[self.n :]

    def lift(self, x) -> np.ndarray:
        """The product-space point ``(x, A x)``."""
        x = np.asarray(x, dtype=float)
        return np.concatenate([x, self.A @ x])

    def paired_sets(self) -> list[tuple[ConvexSet, ConvexSet]]:
        """Pairs ``(C_s, Q_s)``, padding the shorter family at the end with the full space."""
        p, q = len(self.x_sets), len(self.y_sets)
        xs = self.x_sets + [FullSpace(self.n)] * (max(p, q) - p)
        ys = self.y_sets + [FullSpace(self.m)] * (max(p, q) - q)
        return list(zip(xs, ys))

    def build_mssfp_operator(self) -> "MSSFPOperator":
        return MSSFPOperator(self)

    def proximity(self, x, y) -> float:
        """Sum of distances of ``x`` to each ``C_s`` and of ``y`` to each ``Q_t``.

        With one set per family this is ``||x - P_C x|| + ||y - P_Q y||``.
        """
        return float(sum(s.distance(x) for s in self.x_sets) + sum(s.distance(y) for s in self.y_sets))

    def targets(self) -> list[tuple[slice, Target]]:
        """``(coordinate range in z, target)`` for x and for every y-block."""
        out = [(slice(0, self.n), self.x_target)]
        for sl, t in zip(self.blocks, self.block_targets):
            out.append((slice(self.n + sl.start, self.n + sl.stop), t))
        return out


class MSSFPOperator:
    """``P_V o (P_{C_p} x P_{Q_p}) o ... o (P_{C_1} x P_{Q_1})`` on R^(n+m)."""

    def __init__(self, problem: SplitProblem):
        self.problem = problem
        self.pairs = problem.paired_sets()
        self.projector = problem.projector

    @property
    def dim(self) -> int:
        return self.problem.n + self.problem.m

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        x, y = self.problem.split(z)
        for cset, qset in self.pairs:
            x = cset.project(x)
            y = qset.project(y)
        return self.projector.project(np.concatenate([x, y]))

    def proximity(self, z) -> float:
        return self.problem.proximity(*self.problem.split(z))


def assemble_perturbation(x_dir, block_dirs: Sequence, eta: float,
                          partition: Sequence[int] | None = None) -> np.ndarray:
    """``eta * (u, v^1, ..., v^B)`` as one vector of length n + m."""
    block_dirs = [np.asarray(v, dtype=float).ravel() for v in block_dirs]
    if partition is not None:
        if len(partition) != len(block_dirs) or any(
            v.shape[0] != s for v, s in zip(block_dirs, partition)
        ):
            raise ConfigurationError("block directions do not match the partition")
    for v in block_dirs:
        if np.linalg.norm(v) > 1.0 + 1e-12:
            raise ValueError("block directions must have norm at most 1")
    return eta * np.concatenate([np.asarray(x_dir, dtype=float).ravel(), *block_dirs])

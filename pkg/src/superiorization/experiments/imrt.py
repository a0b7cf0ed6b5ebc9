"""Synthetic IMRT split problem with total-variation targets on tumor doses.

Random draw order for ``gen_imrt_instance(seed, ...)``, all from
``numpy.random.default_rng(seed)``:

1. tumor phantom: for each tumor, a seed pixel then Eden growth steps;
2. reference doses ``y_ref`` (organ pixels U[0, 15], tumor pixels U[10, 40]);
3. the n x m matrix ``W`` with U[0, 1] entries (redrawn if ill-conditioned);
4. margins ``eps_1 .. eps_{2L+3}`` in (0, 1].

Start points come from ``default_rng([seed, 1 + run])``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..convex_sets import Box, LabeledIntervalSet, feasibility_tolerance
from ..engines import RunConfig, run_smp_basic, run_smp_superiorized
from ..exceptions import ConfigurationError
from ..schedules import KernelSchedule, RestartSchedule
from ..split_problems import SplitProblem
from ..targets import TVGrid, ZeroTarget

__all__ = [
    "ImrtInstance",
    "gen_imrt_instance",
    "grow_phantom",
    "start_point",
    "ALGORITHMS",
    "run_exp3",
    "tumor_tv",
]

MAX_CONDITION = 1e12


@dataclass(eq=False)
class ImrtInstance:
    M: int
    n: int
    seed: int
    labels_grid: np.ndarray        # M x M; 0 = organ-at-risk, l = tumor l
    order: np.ndarray              # pixel index (row-major) of each row of A
    row_labels: np.ndarray         # label of each row of A
    A: np.ndarray                  # m x n, rows in ``order``
    x_ref: np.ndarray
    y_ref: np.ndarray              # in ``order``
    bounds: dict                   # "organ", "tumor_l" -> (lo, hi), "intensity" -> (lo, hi)
    eps: np.ndarray
    condition: float = field(default=float("nan"))

    @property
    def m(self) -> int:
        return self.M * self.M

    @property
    def L(self) -> int:
        return int(self.labels_grid.max(initial=0))

    @property
    def partition(self) -> tuple[int, ...]:
        sizes = [int(np.sum(self.row_labels == lab)) for lab in range(1, self.L + 1)]
        organ = int(np.sum(self.row_labels == 0))
        return tuple(sizes + ([organ] if organ else []))

    def tumor_mask(self, label: int) -> np.ndarray:
        return self.labels_grid == label

    def intervals(self) -> dict[int, tuple[float, float]]:
        out = {0: self.bounds["organ"]}
        for lab in range(1, self.L + 1):
            out[lab] = self.bounds[f"tumor_{lab}"]
        return out

    def dose_set(self) -> LabeledIntervalSet:
        return LabeledIntervalSet(self.row_labels, self.intervals())

    def intensity_set(self) -> Box:
        lo, hi = self.bounds["intensity"]
        return Box.uniform(self.n, lo, hi)

    def problem(self, tv: bool = True) -> SplitProblem:
        """Split problem with TV targets on tumor blocks and zero targets elsewhere."""
        targets = []
        for lab in range(1, self.L + 1):
            targets.append(TVGrid(mask=self.tumor_mask(lab)) if tv else ZeroTarget(int(self.tumor_mask(lab).sum())))
        if np.any(self.row_labels == 0):
            targets.append(ZeroTarget(int(np.sum(self.row_labels == 0))))
        return SplitProblem(self.A, [self.intensity_set()], [self.dose_set()], self.partition,
                            ZeroTarget(self.n), targets)

    def to_grid(self, y) -> np.ndarray:
        """Dose vector in row order -> M x M image."""
        grid = np.empty(self.m)
        grid[self.order] = y
        return grid.reshape(self.M, self.M)

    def certify(self) -> None:
        """Assert that ``x_ref`` satisfies every intensity and dose bound."""
        y = self.A @ self.x_ref
        if not np.allclose(y, self.y_ref, rtol=1e-8, atol=1e-8 * (1 + np.abs(self.y_ref).max())):
            raise AssertionError("reference doses do not match A @ x_ref")
        if self.intensity_set().distance(self.x_ref) > feasibility_tolerance(self.x_ref):
            raise AssertionError("reference intensities violate the intensity bounds")
        if self.dose_set().distance(y) > feasibility_tolerance(y):
            raise AssertionError("reference doses violate the dose bounds")

    def save(self, path) -> None:
        np.savez_compressed(
            path, M=self.M, n=self.n, seed=self.seed, labels_grid=self.labels_grid,
            order=self.order, row_labels=self.row_labels, A=self.A, x_ref=self.x_ref,
            y_ref=self.y_ref, eps=self.eps, condition=self.condition,
            bound_names=np.array(list(self.bounds)),
            bound_values=np.array(list(self.bounds.values()), dtype=float),
        )

    @classmethod
    def load(cls, path) -> "ImrtInstance":
        with np.load(path) as d:
            bounds = {str(k): (float(v[0]), float(v[1]))
                      for k, v in zip(d["bound_names"], d["bound_values"])}
            return cls(int(d["M"]), int(d["n"]), int(d["seed"]), d["labels_grid"], d["order"],
                       d["row_labels"], d["A"], d["x_ref"], d["y_ref"], bounds, d["eps"],
                       float(d["condition"]))

    def describe(self) -> dict:
        return {
            "M": self.M, "m": self.m, "n": self.n, "L": self.L, "seed": self.seed,
            "partition": list(self.partition),
            "bounds": {k: list(v) for k, v in self.bounds.items()},
            "eps": self.eps.tolist(),
            "condition": self.condition,
        }


def _grow_blob(rng: np.random.Generator, grid: np.ndarray, lab: int, size: int) -> bool:
    M = grid.shape[0]
    margin = max(1, M // 5)
    for _ in range(1000):
        s, t = rng.integers(margin, M - margin, size=2)
        if grid[s, t] == 0:
            break
    else:
        raise ConfigurationError("could not place a tumor seed")
    blob = [(int(s), int(t))]
    grid[s, t] = lab
    tries = 0
    while len(blob) < size:
        ps, pt = blob[rng.integers(len(blob))]
        ds, dt = ((1, 0), (-1, 0), (0, 1), (0, -1))[rng.integers(4)]
        qs, qt = ps + ds, pt + dt
        if 0 <= qs < M and 0 <= qt < M and grid[qs, qt] == 0:
            # keep tumors apart so each one is bordered by organ tissue
            neighbours = grid[max(qs - 1, 0):qs + 2, max(qt - 1, 0):qt + 2]
            if np.all((neighbours == 0) | (neighbours == lab)):
                grid[qs, qt] = lab
                blob.append((qs, qt))
                tries = 0
                continue
        tries += 1
        if tries > 100 * size:
            return False
    return True


def grow_phantom(rng: np.random.Generator, M: int, sizes) -> np.ndarray:
    """Label grid with ``len(sizes)`` disjoint, connected, irregular blobs."""
    grid = np.zeros((M, M), dtype=np.int64)
    if sum(sizes) > M * M // 2:
        raise ConfigurationError("tumors would cover more than half of the grid")
    for lab, size in enumerate(sizes, start=1):
        for _ in range(50):
            if _grow_blob(rng, grid, lab, size):
                break
            grid[grid == lab] = 0  # boxed in by the grid edge or another tumor: start over
        else:
            raise ConfigurationError("tumor growth got stuck; use a larger grid")
    return grid


def gen_imrt_instance(seed: int, M: int = 20, n: int | None = None, L: int = 2,
                      tumor_pixels: int | None = None, max_attempts: int = 5) -> ImrtInstance:
    """Random instance whose reference plan ``x_ref = W y_ref`` is feasible by construction."""
    m = M * M
    if n is None:
        n = int(round(m * 1.15))
    if n < m:
        raise ConfigurationError(f"need n >= m = {m} beamlets, got {n}")
    if tumor_pixels is None:
        tumor_pixels = max(4, m // 10)
    rng = np.random.default_rng(seed)

    grid = grow_phantom(rng, M, [tumor_pixels] * L)
    flat = grid.ravel()
    order = np.concatenate([np.flatnonzero(flat == lab) for lab in range(1, L + 1)]
                           + [np.flatnonzero(flat == 0)])
    row_labels = flat[order]

    y_ref = np.where(row_labels == 0, rng.uniform(0, 15, m), rng.uniform(10, 40, m))

    for _ in range(max_attempts):
        W = rng.uniform(0, 1, (n, m))
        gram = W.T @ W
        cond = float(np.linalg.cond(gram))
        if cond < MAX_CONDITION:
            break
    else:
        raise ConfigurationError(f"W^T W stayed ill-conditioned after {max_attempts} draws")
    A = np.linalg.solve(gram, W.T)
    x_ref = W @ y_ref

    eps = 1.0 - rng.random(2 * L + 3)  # in (0, 1]
    organ = y_ref[row_labels == 0]
    bounds = {"organ": (0.0, float(organ.max() + 5 * eps[0]) if organ.size else 0.0)}
    for lab in range(1, L + 1):
        vals = y_ref[row_labels == lab]
        bounds[f"tumor_{lab}"] = (float(vals.min() - 5 * eps[2 * lab - 1]),
                                  float(vals.max() + 5 * eps[2 * lab]))
    bounds["intensity"] = (float((eps[2 * L + 1] + 1) / 2 * x_ref.min()),
                           float((1 + eps[2 * L + 2] / 2) * x_ref.max()))

    inst = ImrtInstance(M, n, seed, grid, order, row_labels, A, x_ref, A @ x_ref, bounds, eps, cond)
    inst.certify()
    return inst


def start_point(inst: ImrtInstance, run: int = 0) -> np.ndarray:
    lo, hi = inst.bounds["intensity"]
    return np.random.default_rng([inst.seed, 1 + run]).uniform(lo, hi, inst.n)


# (name, schedule factory or None, perturbations per outer iteration)
ALGORITHMS = {
    "basic": None,
    "superiorized": lambda: KernelSchedule(alpha=0.999, c=100_000.0),
    "restarts": lambda: RestartSchedule(alpha=0.99, c=100.0, windows=20),
}


def run_exp3(inst: ImrtInstance, algorithms=("basic", "superiorized", "restarts"), run: int = 0,
             proximity_tol: float = 0.01, max_iterations: int = 100_000, n_perturbations: int = 5,
             guard: int = 1_000_000, tv: bool = True, schedules: dict | None = None) -> dict:
    """Run the requested algorithms from one shared start point.

    Returns ``{name: IterationTrace}``; traces are kept in summary mode.
    """
    problem = inst.problem(tv=tv)
    x0 = start_point(inst, run)
    cfg = RunConfig(n_perturbations=n_perturbations, max_iterations=max_iterations,
                    proximity_tol=proximity_tol, guard=guard, trace="summary")
    schedules = schedules or {}
    out = {}
    for name in algorithms:
        if name not in ALGORITHMS:
            raise ConfigurationError(f"unknown IMRT algorithm {name!r}")
        factory = schedules.get(name, ALGORITHMS[name])
        t0 = time.perf_counter()
        if factory is None:
            trace = run_smp_basic(problem, x0, cfg)
        else:
            trace = run_smp_superiorized(problem, x0, factory(), cfg)
        trace.wall_time = time.perf_counter() - t0
        out[name] = trace
    return out


def tumor_tv(inst: ImrtInstance, trace) -> list[float]:
    """TV of each tumor's dose subvector at the final iterate."""
    problem_blocks = inst.problem().blocks
    y = trace.final[inst.n:]
    return [TVGrid(mask=inst.tumor_mask(lab)).evaluate(y[problem_blocks[lab - 1]])
            for lab in range(1, inst.L + 1)]

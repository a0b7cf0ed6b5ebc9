"""JSON description of a feasibility or split problem for the generic ``run`` command.

Single-space problem::

    {"sets": [{"type": "halfspace", "normal": [1, 1], "offset": 1, "sense": ">="}, ...],
     "start": [0.3, 0.0],
     "target": {"type": "squared_norm"},
     "schedule": {"alpha": 0.5, "c": 1.0, "window": "none"},
     "n_perturbations": 1, "max_iterations": 50, "proximity_tol": null}

Split problem: replace ``sets`` by ``"A"``, ``"x_sets"``, ``"y_sets"`` and
optionally ``"partition"``, ``"x_target"`` and ``"block_targets"``.  ``"A"``
is a nested list or the path of a ``.npy`` or ``.csv`` file, relative to the
problem file.  A missing or null ``schedule`` runs the basic algorithm.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .convex_sets import Ball, Box, ConvexSet, FullSpace, HalfSpace
from .engines import (
    IterationTrace,
    RunConfig,
    SequentialProjections,
    run_basic,
    run_smp_basic,
    run_smp_superiorized,
    run_superiorized,
)
from .exceptions import ConfigurationError
from .schedules import KernelSchedule, schedule_from_config
from .split_problems import SplitProblem
from .targets import FixedDirection, LinearForm, SquaredNorm, Target, TVGrid, ZeroTarget

__all__ = ["parse_set", "parse_target", "load_matrix", "ProblemSpec", "load_problem"]

RUN_KEYS = {"n_perturbations", "max_iterations", "proximity_tol", "guard"}


def parse_set(d: dict, dim: int | None = None) -> ConvexSet:
    kind = str(d.get("type", "")).lower()
    try:
        if kind == "halfspace":
            if d.get("sense", "<=") == ">=":
                return HalfSpace.geq(d["normal"], d["offset"])
            return HalfSpace(d["normal"], d["offset"])
        if kind == "ball":
            return Ball(d["center"], d["radius"])
        if kind == "box":
            if np.ndim(d["lower"]) == 0 and np.ndim(d["upper"]) == 0:
                if dim is None:
                    raise ConfigurationError("a scalar box needs the space dimension")
                return Box.uniform(dim, d["lower"], d["upper"])
            return Box(d["lower"], d["upper"])
        if kind == "full":
            return FullSpace(int(d.get("dim", dim)))
    except KeyError as exc:
        raise ConfigurationError(f"set {kind!r} is missing field {exc}") from exc
    raise ConfigurationError(f"unknown set type {d.get('type')!r}")


def parse_target(d: dict | None, dim: int | None = None) -> Target:
    if d is None:
        return ZeroTarget(dim)
    kind = str(d.get("type", "")).lower()
    if kind == "zero":
        target = ZeroTarget(dim)
    elif kind == "squared_norm":
        target = SquaredNorm(float(d.get("scale", 0.5)), dim)
    elif kind == "linear":
        target = LinearForm(d["a"])
    elif kind == "tv":
        if "mask" in d:
            target = TVGrid(mask=np.asarray(d["mask"], dtype=bool))
        else:
            target = TVGrid(M=int(d["M"]))
    else:
        raise ConfigurationError(f"unknown target type {d.get('type')!r}")
    if "direction" in d:
        target = FixedDirection(target, d["direction"])
    return target


@dataclass
class ProblemSpec:
    start: np.ndarray
    schedule: KernelSchedule | None
    run: RunConfig
    sets: list | None = None
    target: Target | None = None
    split: SplitProblem | None = None

    def solve(self) -> IterationTrace:
        if self.split is not None:
            if self.schedule is None:
                return run_smp_basic(self.split, self.start, self.run)
            return run_smp_superiorized(self.split, self.start, self.schedule, self.run)
        T = SequentialProjections(self.sets, dim=self.start.shape[0])
        if self.schedule is None:
            return run_basic(T, self.start, self.run, proximity_fn=T.proximity, monitor=self.target)
        return run_superiorized(T, self.target, self.start, self.schedule, self.run,
                                proximity_fn=T.proximity)


def load_matrix(src, base: Path | None = None) -> np.ndarray:
    if isinstance(src, str):
        path = Path(src)
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            if path.suffix == ".npy":
                return np.load(path)
            return np.loadtxt(path, delimiter=",", ndmin=2)
        except (OSError, ValueError) as exc:
            raise ConfigurationError(f"cannot read matrix {path}: {exc}") from exc
    return np.array(src, dtype=float, ndmin=2)


def load_problem(d: dict, trace: str = "full", base: Path | None = None) -> ProblemSpec:
    """Validate a problem description and build its sets, targets and schedule."""
    if not isinstance(d, dict):
        raise ConfigurationError("a problem file must hold a JSON object")
    if "start" not in d:
        raise ConfigurationError("a problem file needs a 'start' point")
    start = np.asarray(d["start"], dtype=float)
    if start.ndim != 1 or not np.all(np.isfinite(start)):
        raise ConfigurationError("'start' must be a finite vector")
    run_opts = {k: d[k] for k in RUN_KEYS if k in d}
    run = RunConfig(trace=trace, **run_opts)
    if run.proximity_tol is None and "max_iterations" not in d:
        raise ConfigurationError("without a proximity stop rule 'max_iterations' is required")
    sched = d.get("schedule")
    schedule = schedule_from_config(sched) if sched is not None else None

    if "A" in d:
        A = load_matrix(d["A"], base)
        m, n = A.shape
        if start.shape[0] != n:
            raise ConfigurationError(f"start has {start.shape[0]} entries, A has {n} columns")
        partition = d.get("partition")
        blocks = d.get("block_targets")
        split = SplitProblem(
            A,
            [parse_set(s, n) for s in d.get("x_sets", [])],
            [parse_set(s, m) for s in d.get("y_sets", [])],
            partition,
            parse_target(d.get("x_target"), n),
            None if blocks is None else [parse_target(b) for b in blocks],
        )
        return ProblemSpec(start, schedule, run, split=split)

    dim = start.shape[0]
    sets = [parse_set(s, dim) for s in d.get("sets", [])]
    for s in sets:
        if s.dim != dim:
            raise ConfigurationError(f"set of dimension {s.dim} for a start point in R^{dim}")
    target = parse_target(d.get("target"), dim)
    if target.dim is not None and target.dim != dim:
        raise ConfigurationError("target dimension does not match the start point")
    return ProblemSpec(start, schedule, run, sets=sets, target=target)

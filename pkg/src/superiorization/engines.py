"""Basic feasibility-seeking iteration and its superiorized versions.

All drivers share one outer loop:

    z^{k,0} = z^k
    for j in 0..N-1:             # skipped by the basic algorithm
        v = nonascending direction(s) at z^{k,j}
        draw candidates eta from the schedule until no target exceeds its
        value at z^k, then z^{k,j+1} = z^{k,j} + eta v
    (restart bookkeeping of the schedule)
    z^{k+1} = T(z^{k,N})

A target is any ``(coordinate range, Target)`` pair, so a single-space run
and a split problem with per-block targets go through the same code.
"""
from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .convex_sets import ConvexSet
from .exceptions import ConfigurationError, NumericalDivergence
from .schedules import KernelSchedule, RestartSchedule
from .split_problems import SplitProblem
from .targets import Target

__all__ = [
    "SequentialProjections",
    "RunConfig",
    "IterationTrace",
    "perturb_inner_loop",
    "run_basic",
    "run_superiorized",
    "run_superiorized_restarts",
    "run_smp_basic",
    "run_smp_superiorized",
    "proximity",
]

log = logging.getLogger(__name__)

Component = tuple[slice, Target]


class SequentialProjections:
    """``T = P_{C_p} o ... o P_{C_1}``; the empty composition is the identity."""

    def __init__(self, sets: Sequence[ConvexSet], dim: int | None = None):
        self.sets = list(sets)
        dims = {s.dim for s in self.sets}
        if len(dims) > 1:
            raise ConfigurationError(f"sets of different dimensions {sorted(dims)}")
        self.dim = dims.pop() if dims else dim

    def __call__(self, x) -> np.ndarray:
        x = np.array(x, dtype=float)
        for s in self.sets:
            x = s.project(x)
        return x

    def proximity(self, x) -> float:
        return float(sum(s.distance(x) for s in self.sets))


@dataclass
class RunConfig:
    """Outer-loop settings.

    With ``proximity_tol=None`` the run performs exactly ``max_iterations``
    outer iterations; otherwise it stops at the first iterate whose proximity
    is below ``proximity_tol`` or at the cap.
    """

    n_perturbations: int = 1
    max_iterations: int = 100_000
    proximity_tol: float | None = 0.01
    guard: int = 200
    trace: str = "full"

    def __post_init__(self):
        if int(self.n_perturbations) != self.n_perturbations or self.n_perturbations < 1:
            raise ConfigurationError("n_perturbations must be a positive integer")
        if self.guard < 1:
            raise ConfigurationError("guard must be at least 1")
        if self.max_iterations < 0:
            raise ConfigurationError("max_iterations must be nonnegative")
        if self.trace not in ("full", "summary"):
            raise ConfigurationError("trace must be 'full' or 'summary'")
        if self.proximity_tol is not None and not self.proximity_tol > 0:
            raise ConfigurationError("proximity_tol must be positive")


@dataclass
class IterationTrace:
    """Per-iteration record of a run; row ``k = 0`` describes the start point."""

    target_names: list[str]
    k: list[int] = field(default_factory=list)
    proximity: list[float] = field(default_factory=list)
    targets: list[list[float]] = field(default_factory=list)
    steps: list[float] = field(default_factory=list)
    consumed: list[int] = field(default_factory=list)
    restarts: list[bool] = field(default_factory=list)
    iterates: list[np.ndarray] | None = None
    perturbed: list[np.ndarray] | None = None
    final: np.ndarray | None = None
    termination: str = ""
    guard_hits: int = 0
    wall_time: float = 0.0

    @property
    def iterations(self) -> int:
        return self.k[-1] if self.k else 0

    @property
    def restart_count(self) -> int:
        return int(sum(self.restarts))

    @property
    def accepted_step_sum(self) -> float:
        return float(sum(self.steps))

    def final_targets(self) -> dict[str, float]:
        return dict(zip(self.target_names, self.targets[-1])) if self.targets else {}

    def rows(self):
        for i, k in enumerate(self.k):
            yield [k, self.proximity[i], *self.targets[i], self.steps[i],
                   self.consumed[i], int(self.restarts[i])]

    def header(self) -> list[str]:
        return ["k", "proximity", *self.target_names, "step", "consumed", "restart"]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.header())
            for row in self.rows():
                writer.writerow([_fmt(v) for v in row])

    def summary(self, include_final: bool | None = None) -> dict:
        final = self.final
        if include_final is None:
            include_final = final is not None and final.size <= 64
        out = {
            "iterations": self.iterations,
            "termination": self.termination,
            "final_proximity": self.proximity[-1] if self.proximity else None,
            "final_targets": self.final_targets(),
            "accepted_step_sum": self.accepted_step_sum,
            "restarts": self.restart_count,
            "guard_hits": self.guard_hits,
        }
        if include_final and final is not None:
            out["final"] = final.tolist()
        return out


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _evaluate(components: Sequence[Component], z) -> list[float]:
    return [t.evaluate(z[sl]) for sl, t in components]


def _perturb(z, components: Sequence[Component], schedule: KernelSchedule,
             n_perturbations: int, guard: int):
    """Inner loop of one outer iteration; returns ``(z^{k,N}, step_sum, consumed, guard_hits)``."""
    reference = _evaluate(components, z)
    current = z.copy()
    step_sum, consumed, hits = 0.0, 0, 0
    for _ in range(n_perturbations):
        moving = []
        for (sl, t), ref in zip(components, reference):
            v = t.nonascending(current[sl])
            if np.any(v):
                moving.append((sl, t, v, ref))
        eta = schedule.next_candidate()
        consumed += 1
        rejected = 0
        while moving and eta != 0.0:
            candidate = current.copy()
            for sl, _, v, _ in moving:
                candidate[sl] += eta * v
            # components with a zero direction keep a value already <= reference
            if not any(t.evaluate(candidate[sl]) > ref for sl, t, _, ref in moving):
                current = candidate
                break
            rejected += 1
            if rejected >= guard:
                hits += 1
                log.warning("no acceptable step after %d candidates; taking a zero step", rejected)
                eta = 0.0
                break
            eta = schedule.next_candidate()
            consumed += 1
        step_sum += eta
    return current, step_sum, consumed, hits


def perturb_inner_loop(y, target: Target, schedule: KernelSchedule, n_perturbations: int = 1,
                       guard: int = 200) -> np.ndarray:
    """Apply ``n_perturbations`` accepted perturbations to ``y`` (one outer iteration's worth)."""
    y = np.asarray(y, dtype=float)
    out, *_ = _perturb(y, [(slice(0, y.shape[0]), target)], schedule, n_perturbations, guard)
    return out


def _drive(T: Callable, z0, components: Sequence[Component] | None, schedule: KernelSchedule | None,
           cfg: RunConfig, prox: Callable | None, monitor: Sequence[Component],
           names: Sequence[str]) -> IterationTrace:
    cfg = cfg or RunConfig()
    if cfg.proximity_tol is not None and prox is None:
        raise ConfigurationError("a proximity stop rule needs a proximity function")
    z = np.array(z0, dtype=float)
    if not np.all(np.isfinite(z)):
        raise NumericalDivergence("non-finite start point")
    full = cfg.trace == "full"
    trace = IterationTrace(target_names=list(names))
    if full:
        trace.iterates, trace.perturbed = [z.copy()], []

    def record(k, zk, step, consumed, restart):
        trace.k.append(k)
        trace.proximity.append(float(prox(zk)) if prox is not None else math.nan)
        trace.targets.append(_evaluate(monitor, zk))
        trace.steps.append(step)
        trace.consumed.append(consumed)
        trace.restarts.append(restart)

    start = time.perf_counter()
    record(0, z, 0.0, 0, False)
    trace.termination = "iterations"
    for k in range(1, cfg.max_iterations + 1):
        step, consumed, restart = 0.0, 0, False
        if components:
            z_pert, step, consumed, hits = _perturb(z, components, schedule, cfg.n_perturbations, cfg.guard)
            trace.guard_hits += hits
        else:
            z_pert = z
        if schedule is not None:
            restart = schedule.complete_outer_iteration()
        z = T(z_pert)
        if not np.all(np.isfinite(z)):
            raise NumericalDivergence(f"non-finite iterate at outer iteration {k}")
        record(k, z, step, consumed, restart)
        if full:
            trace.perturbed.append(np.array(z_pert, dtype=float))
            trace.iterates.append(z.copy())
        if cfg.proximity_tol is not None:
            if trace.proximity[-1] < cfg.proximity_tol:
                trace.termination = "proximity"
                break
    else:
        if cfg.proximity_tol is not None:
            trace.termination = "max_iterations"
    trace.final = z
    trace.wall_time = time.perf_counter() - start
    return trace


def _single_space(T, x0, target, monitor):
    x0 = np.asarray(x0, dtype=float)
    if getattr(T, "dim", None) is not None and x0.shape != (T.dim,):
        raise ValueError(f"dimension mismatch: operator acts on R^{T.dim}, start has shape {x0.shape}")
    comps = [(slice(0, x0.shape[0]), target)] if target is not None else None
    if monitor is None:
        monitor = comps or []
    return x0, comps, monitor


def run_basic(T: Callable, x0, cfg: RunConfig | None = None, proximity_fn: Callable | None = None,
              monitor: Target | None = None) -> IterationTrace:
    """Iterate ``x^{k+1} = T(x^k)``; ``monitor`` only records a target's values."""
    x0, _, mon = _single_space(T, x0, monitor, None)
    prox = proximity_fn or getattr(T, "proximity", None)
    return _drive(T, x0, None, None, cfg or RunConfig(), prox, mon, ["phi"] * len(mon))


def run_superiorized(T: Callable, target: Target, x0, schedule: KernelSchedule,
                     cfg: RunConfig | None = None, proximity_fn: Callable | None = None) -> IterationTrace:
    """Superiorized version of the basic algorithm with the given step schedule."""
    x0, comps, mon = _single_space(T, x0, target, None)
    prox = proximity_fn or getattr(T, "proximity", None)
    return _drive(T, x0, comps, schedule, cfg or RunConfig(), prox, mon, ["phi"])


def run_superiorized_restarts(T: Callable, target: Target, x0, schedule: RestartSchedule,
                              cfg: RunConfig | None = None,
                              proximity_fn: Callable | None = None) -> IterationTrace:
    """As :func:`run_superiorized`, with the restart bookkeeping of ``schedule``."""
    if not isinstance(schedule, RestartSchedule):
        raise ConfigurationError("restarted superiorization needs a RestartSchedule")
    return run_superiorized(T, target, x0, schedule, cfg, proximity_fn)


def _smp_names(problem: SplitProblem) -> list[str]:
    return ["f"] + [f"phi_{b + 1}" for b in range(len(problem.partition))]


def run_smp_basic(problem: SplitProblem, x0, cfg: RunConfig | None = None) -> IterationTrace:
    """Alternating projections in the product space, started at ``(x0, A x0)``."""
    T = problem.build_mssfp_operator()
    z0 = problem.lift(_check_x(problem, x0))
    return _drive(T, z0, None, None, cfg or RunConfig(), T.proximity, problem.targets(),
                  _smp_names(problem))


def run_smp_superiorized(problem: SplitProblem, x0, schedule: KernelSchedule,
                         cfg: RunConfig | None = None) -> IterationTrace:
    """Superiorize f on x and every ``phi_b`` on its block ``y^b`` with one shared step."""
    T = problem.build_mssfp_operator()
    z0 = problem.lift(_check_x(problem, x0))
    comps = problem.targets()
    return _drive(T, z0, comps, schedule, cfg or RunConfig(), T.proximity, comps,
                  _smp_names(problem))


def _check_x(problem: SplitProblem, x0) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (problem.n,):
        raise ValueError(f"start point must have shape ({problem.n},), got {x0.shape}")
    return x0


def proximity(problem: SplitProblem, x, y) -> float:
    """``||x - P_C x|| + ||y - P_Q y||`` (summed over the sets of each family)."""
    return problem.proximity(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

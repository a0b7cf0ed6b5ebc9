"""Minimum-norm point in the intersection of two disks: AP versus superiorization."""
from __future__ import annotations

import numpy as np

from ..convex_sets import Ball
from ..engines import RunConfig, SequentialProjections, run_basic, run_superiorized
from ..exceptions import ConfigurationError
from ..schedules import KernelSchedule, schedule_from_config
from ..targets import SquaredNorm

__all__ = ["DEFAULT_BALLS", "DEFAULT_METHODS", "run_exp1_balls"]

DEFAULT_BALLS = {
    # the minimum-norm point of the lens is its lower corner
    "A": {"center": [3.0, 0.0], "radius": 2.5},
    "B": {"center": [0.0, 3.0], "radius": 2.5},
    "start": [5.0, 4.0],
}

# None marks the unperturbed basic algorithm
DEFAULT_METHODS = {
    "ap": None,
    "sup_0.6": {"alpha": 0.6, "c": 1.0, "window": "none"},
    "sup_0.999": {"alpha": 0.999, "c": 1.0, "window": "none"},
    "res_0.6": {"alpha": 0.6, "c": 1.0, "window": 50},
}


def run_exp1_balls(cfg: dict | None = None, iterations: int = 500, trace: str = "full") -> dict:
    """Run every method from the same start; returns ``{name: IterationTrace}``.

    ``cfg`` may override ``A``, ``B``, ``start`` and ``methods`` (a dict of
    schedule configs, ``None`` for alternating projections).
    """
    cfg = {**DEFAULT_BALLS, **(cfg or {})}
    methods = cfg.get("methods", DEFAULT_METHODS)
    try:
        A = Ball(cfg["A"]["center"], cfg["A"]["radius"])
        B = Ball(cfg["B"]["center"], cfg["B"]["radius"])
    except (KeyError, TypeError) as exc:
        raise ConfigurationError(f"malformed ball description: {exc}") from exc
    T = SequentialProjections([A, B])
    start = np.asarray(cfg["start"], dtype=float)
    run_cfg = RunConfig(n_perturbations=1, max_iterations=iterations, proximity_tol=None, trace=trace)
    target = SquaredNorm(0.5, dim=T.dim)
    out = {}
    for name, sched in methods.items():
        if sched is None:
            out[name] = run_basic(T, start, run_cfg, proximity_fn=T.proximity, monitor=target)
        else:
            schedule = sched if isinstance(sched, KernelSchedule) else schedule_from_config(sched)
            out[name] = run_superiorized(T, target, start, schedule, run_cfg, proximity_fn=T.proximity)
    return out

"""Two half-spaces where superiorization can do worse than plain alternating projections.

``A = {x1 + x2 >= 1}`` and ``B = {x1 - x2 <= 0}`` meet at the wedge whose
minimum-norm point is ``(1/2, 1/2)``.  With step-sizes ``2**-ell`` and one
perturbation per iteration, the perturbations can vanish before they steer
the iterates to that point.
"""
from __future__ import annotations

import numpy as np

from ..convex_sets import HalfSpace
from ..engines import RunConfig, SequentialProjections, run_basic, run_superiorized
from ..schedules import KernelSchedule
from ..targets import SquaredNorm

__all__ = ["MIN_NORM_POINT", "guarantee_operator", "demo_guarantee_problem"]

MIN_NORM_POINT = np.array([0.5, 0.5])


def guarantee_operator() -> SequentialProjections:
    """``T = P_B P_A``."""
    return SequentialProjections([HalfSpace.geq([1.0, 1.0], 1.0), HalfSpace([1.0, -1.0], 0.0)])


def demo_guarantee_problem(start=(0.3, 0.0), iterations: int = 50, alpha: float = 0.5,
                           trace: str = "full") -> dict:
    """Basic and superiorized traces from ``start`` for side-by-side output."""
    T = guarantee_operator()
    cfg = RunConfig(n_perturbations=1, max_iterations=iterations, proximity_tol=None, trace=trace)
    target = SquaredNorm(0.5, dim=2)
    return {
        "basic": run_basic(T, start, cfg, monitor=target),
        "superiorized": run_superiorized(T, target, start, KernelSchedule(alpha, 1.0), cfg),
    }

"""A planar split problem: three half-planes in x, their rotated images in y."""
from __future__ import annotations

import numpy as np

from ..convex_sets import HalfSpace
from ..engines import RunConfig, run_smp_basic, run_smp_superiorized
from ..schedules import KernelSchedule
from ..split_problems import SplitProblem
from ..targets import FixedDirection, LinearForm, negated_coordinate

__all__ = ["ROTATION", "SOLUTION", "exp2_problem", "run_exp2"]

# rotation by pi/2
ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])
SOLUTION = np.array([9.0, 1.0])


def exp2_problem(rotated_q: bool = False, x_direction=None) -> SplitProblem:
    """``C = {x1 + x2 <= 10, -13 x1 + 3 x2 <= -26, x2 >= 1}`` and three half-planes Q.

    By default Q is ``{y1 - y2 <= -10, -3 y1 - 13 y2 <= -26, y1 <= -1}``.
    Its first half-plane is the image of ``x1 + x2 >= 10`` rather than of
    ``C_1``, so together the two spaces pin x to the line ``x1 + x2 = 10``.
    ``rotated_q=True`` uses the exact image ``R C`` instead.

    Targets: ``f(x) = x2`` on x and ``-y1``, ``-y2`` on the two
    one-coordinate blocks of y.  The x-direction is the normalized negative
    gradient ``(0, -1)`` unless ``x_direction`` fixes another one.
    """
    f = LinearForm([0.0, 1.0])
    if x_direction is not None:
        f = FixedDirection(f, x_direction)
    C = [HalfSpace([1.0, 1.0], 10.0), HalfSpace([-13.0, 3.0], -26.0), HalfSpace.geq([0.0, 1.0], 1.0)]
    if rotated_q:
        # <c, x> <= b with y = R x becomes <R c, y> <= b
        Q = [HalfSpace(ROTATION @ s.normal, s.offset) for s in C]
    else:
        Q = [HalfSpace([1.0, -1.0], -10.0), HalfSpace([-3.0, -13.0], -26.0), HalfSpace([1.0, 0.0], -1.0)]
    return SplitProblem(ROTATION, C, Q, partition=(1, 1), x_target=f,
                        block_targets=[negated_coordinate(0, 1), negated_coordinate(0, 1)])


def run_exp2(start=(0.0, 0.0), iterations: int = 50, alpha: float = 0.9, c: float = 1.0,
             trace: str = "full", rotated_q: bool = False, x_direction=None) -> dict:
    """Basic and superiorized runs (N = 1) from ``start``; returns ``{name: IterationTrace}``."""
    problem = exp2_problem(rotated_q, x_direction)
    cfg = RunConfig(n_perturbations=1, max_iterations=iterations, proximity_tol=None, trace=trace)
    return {
        "basic": run_smp_basic(problem, start, cfg),
        "superiorized": run_smp_superiorized(problem, start, KernelSchedule(alpha, c), cfg),
    }

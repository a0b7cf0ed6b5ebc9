"""Superiorization of feasibility-seeking projection methods.

Projection-based basic algorithms, their superiorized versions with and
without step-size restarts, and a superiorizer for split problems whose
y-space targets act independently on subvectors.
"""
from .convex_sets import (
    AffineGraphProjector,
    Ball,
    Box,
    ConvexSet,
    FullSpace,
    HalfSpace,
    LabeledIntervalSet,
    ProductSet,
    distance,
)
from .engines import (
    IterationTrace,
    RunConfig,
    SequentialProjections,
    perturb_inner_loop,
    proximity,
    run_basic,
    run_smp_basic,
    run_smp_superiorized,
    run_superiorized,
    run_superiorized_restarts,
)
from .exceptions import ConfigurationError, NonConvergence, NumericalDivergence
from .schedules import KernelSchedule, RestartSchedule
from .split_problems import MSSFPOperator, SplitProblem, assemble_perturbation
from .targets import FixedDirection, LinearForm, SquaredNorm, Target, TVGrid, ZeroTarget, negated_coordinate

__version__ = "0.1.0"

"""Randomized and semi-randomized primal-dual solvers for problems of the
form min_x f(x) + h(x) + g(Kx) with block-separable f and g, plus the
non-stationary parameter schedules that give them their convergence
rates, two classic baselines, and a measurement harness."""

from . import baselines, blockmat, cli, dataio, frpd, metrics, problems, proxlib, schedules
from .blockmat import BlockMatrix, Partition, opnorm_sq_weighted
from .dataio import Dataset, gen_lad, gen_svm, parse_libsvm, partition
from .metrics import TraceRecord, dual_value, fit_rate, primal_value
from .problems import (
    ProblemConstants,
    ProblemSpec,
    build_lad,
    build_svm,
    constants,
)
from .proxlib import BoxIndicator, Hinge, L1, ProxFn, SqNorm, Zero
from .schedules import (
    ParamState,
    Schedule,
    check_conditions,
    closed_form_s1,
    make_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "baselines",
    "blockmat",
    "cli",
    "dataio",
    "frpd",
    "metrics",
    "problems",
    "proxlib",
    "schedules",
    "BlockMatrix",
    "Partition",
    "opnorm_sq_weighted",
    "Dataset",
    "gen_lad",
    "gen_svm",
    "parse_libsvm",
    "partition",
    "TraceRecord",
    "dual_value",
    "fit_rate",
    "primal_value",
    "ProblemConstants",
    "ProblemSpec",
    "build_lad",
    "build_svm",
    "constants",
    "BoxIndicator",
    "Hinge",
    "L1",
    "ProxFn",
    "SqNorm",
    "Zero",
    "ParamState",
    "Schedule",
    "check_conditions",
    "closed_form_s1",
    "make_schedule",
]

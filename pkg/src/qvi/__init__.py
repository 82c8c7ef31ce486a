"""Solver toolkit for quasimonotone variational inequalities.

Tseng-style extragradient iteration with a non-monotone self-adaptive step
size, feasible-set projections (boxes and the halfspace-relaxed l1 ball), a
zoo of quasimonotone test operators with known solution sets, convergence
diagnostics, and reproducible experiment runners.
"""

from .diagnostics import (
    RateEstimate,
    RatioSeries,
    SeparationCertificate,
    build_separation_certificate,
    estimate_rates,
    fejer_audit,
    ratio_series,
    realized_lipschitz,
    step_bound_violation,
    step_rule_slack,
    tseng_identity_error,
    verify_disjointness,
)
from .experiments import (
    RecoveryInstance,
    RecoveryOutput,
    TableRow,
    TableSpec,
    cubic_problem,
    gen_recovery,
    mse,
    piecewise_problem,
    run_example_table,
    run_recovery,
    sine_problem,
)
from .geometry import (
    Box,
    FeasibleSet,
    HalfSpaceRelaxedL1Ball,
    ProjectionContext,
    box_membership,
    project,
    project_box,
    project_relaxed_l1,
)
from .operators import (
    CubicQuasi,
    LeastSquares,
    Mapping,
    PiecewiseQuad,
    QuasimonotoneReport,
    SinePlusOne,
    check_quasimonotone,
    lipschitz_estimate,
    power_iteration_gram_norm,
)
from .solver import (
    ExactTermination,
    MseToReference,
    NumericError,
    SolveResult,
    SolveTrace,
    SolverConfig,
    SquaredStep,
    XiSequence,
    solve,
    tseng_step,
    update_stepsize,
    xi,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "CubicQuasi",
    "ExactTermination",
    "FeasibleSet",
    "HalfSpaceRelaxedL1Ball",
    "LeastSquares",
    "Mapping",
    "MseToReference",
    "NumericError",
    "PiecewiseQuad",
    "ProjectionContext",
    "QuasimonotoneReport",
    "RateEstimate",
    "RatioSeries",
    "RecoveryInstance",
    "RecoveryOutput",
    "SeparationCertificate",
    "SinePlusOne",
    "SolveResult",
    "SolveTrace",
    "SolverConfig",
    "SquaredStep",
    "TableRow",
    "TableSpec",
    "XiSequence",
    "box_membership",
    "build_separation_certificate",
    "check_quasimonotone",
    "cubic_problem",
    "estimate_rates",
    "fejer_audit",
    "gen_recovery",
    "lipschitz_estimate",
    "mse",
    "piecewise_problem",
    "power_iteration_gram_norm",
    "project",
    "project_box",
    "project_relaxed_l1",
    "ratio_series",
    "realized_lipschitz",
    "run_example_table",
    "run_recovery",
    "sine_problem",
    "solve",
    "step_bound_violation",
    "step_rule_slack",
    "tseng_identity_error",
    "tseng_step",
    "update_stepsize",
    "verify_disjointness",
    "xi",
]

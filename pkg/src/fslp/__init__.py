"""Feasible sequential linear programming: trust-region outer loop, zero-order
inner feasibility iterations, a dense simplex core, and a time-optimal
overhead-crane benchmark problem."""

from .lp import (LpBasis, LpInputError, LpProblem, LpSolution, LpStatus,
                 ToleranceSet, lp_kkt_residual, solve_lp)
from .nlp import (EvaluationError, InfeasibleSlackError, Linearization,
                  NlpProblem, VariablePartition, assemble_w, infeasibility,
                  kkt_residual, linearize, minimal_slack, validate_jacobian)
from .inner import (InnerParams, InnerStatus, InnerTrace, build_plp,
                    contraction_estimate, delta, run_inner)
from .outer import (InfeasibleStartError, IterationRecord, SolveResult,
                    SolveStatus, SolverParams, SubproblemError,
                    build_trust_region_lp, solve, tr_ratio, update_radius)

__all__ = [
    "LpBasis", "LpInputError", "LpProblem", "LpSolution", "LpStatus",
    "ToleranceSet", "lp_kkt_residual", "solve_lp",
    "EvaluationError", "InfeasibleSlackError", "Linearization", "NlpProblem",
    "VariablePartition", "assemble_w", "infeasibility", "kkt_residual",
    "linearize", "minimal_slack", "validate_jacobian",
    "InnerParams", "InnerStatus", "InnerTrace", "build_plp",
    "contraction_estimate", "delta", "run_inner",
    "InfeasibleStartError", "IterationRecord", "SolveResult", "SolveStatus",
    "SolverParams", "SubproblemError", "build_trust_region_lp", "solve",
    "tr_ratio", "update_radius",
]

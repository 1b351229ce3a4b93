"""Trust-region outer loop keeping every accepted iterate feasible.

Each iteration linearizes the constraints at the current (feasible) iterate,
solves the trust-region LP, projects the LP step back onto the feasible set
with the inner feasibility iterations, and accepts or rejects based on the
ratio of actual to predicted objective reduction. Because iterates stay
feasible the objective itself serves as the merit function, and the run can
be stopped early at any accepted iterate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .inner import InnerParams, InnerStatus, build_plp, run_inner
from .lp import LpStatus, ToleranceSet, solve_lp
from .nlp import Linearization, NlpProblem, infeasibility, infeasibility_parts, linearize


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    MAX_ITERATIONS = "max_iterations"
    INNER_FAILURE_STALL = "inner_failure_stall"


class InfeasibleStartError(ValueError):
    """The starting point violates the constraints beyond repair."""


class SubproblemError(RuntimeError):
    """A trust-region LP failed in a way the algorithm cannot recover from."""


@dataclass(frozen=True)
class SolverParams:
    """Outer-loop tuning constants; interval constraints checked on creation."""

    delta0: float = 1.0
    delta_max: float = 10.0
    sigma: float = 1e-8
    sigma_outer: float = 1e-8
    alpha1: float = 0.25
    alpha2: float = 2.0
    eta1: float = 0.25
    eta2: float = 0.75
    inner: InnerParams = field(default_factory=InnerParams)
    max_outer_iterations: int = 500
    radius_floor: float = 1e-16

    def __post_init__(self):
        if not self.delta_max >= 1.0:
            raise ValueError("delta_max must be >= 1")
        if not 0.0 < self.delta0 <= self.delta_max:
            raise ValueError("delta0 must lie in (0, delta_max]")
        if not 0.0 < self.sigma < 0.25:
            raise ValueError("sigma must lie in (0, 1/4)")
        if not 0.0 < self.sigma_outer < 1e-5:
            raise ValueError("sigma_outer must lie in (0, 1e-5)")
        if not 0.0 < self.alpha1 < 1.0 < self.alpha2:
            raise ValueError("need 0 < alpha1 < 1 < alpha2")
        if not 0.0 < self.eta1 < self.eta2 < 1.0:
            raise ValueError("need 0 < eta1 < eta2 < 1")
        if self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be positive")


@dataclass
class IterationRecord:
    k: int
    objective: float
    infeasibility: float
    radius: float
    model_decrease: float
    rho: Optional[float]
    accepted: bool
    inner_iterations: int
    inner_status: InnerStatus
    step_norm: float
    projection_ratio: Optional[float] = None
    lp_pivot_rule: str = ""


@dataclass
class SolveResult:
    status: SolveStatus
    final_point: np.ndarray
    final_duals: tuple  # (lam, pi) sized to the problem's equality/inequality rows
    history: list
    inner_traces: list  # per outer iteration; None when the inner loop did not run
    points: list  # iterate at the start of each outer iteration


def build_trust_region_lp(lin: Linearization, p: NlpProblem, radius: float):
    """Trust-region LP at a linearization: the parametric LP with zero shift."""
    return build_plp(np.zeros(p.n_g), lin, p, radius)


def tr_ratio(cost: np.ndarray, w_hat: np.ndarray, w_bar: np.ndarray,
             w_tilde: np.ndarray) -> float:
    """Actual over predicted objective reduction."""
    cost = np.asarray(cost, dtype=float)
    den = float(cost @ (np.asarray(w_hat) - np.asarray(w_bar)))
    if den == 0.0:
        raise ZeroDivisionError("predicted reduction is zero; termination should have fired")
    return float(cost @ (np.asarray(w_hat) - np.asarray(w_tilde))) / den


def update_radius(params: SolverParams, rho: Optional[float], step_norm: float,
                  radius: float, hit_boundary: bool) -> float:
    """Next trust-region radius. ``rho=None`` marks an inner-iteration failure,
    which shrinks the radius proportionally to the realized step length."""
    if rho is None or rho < params.eta1:
        return params.alpha1 * step_norm
    if rho > params.eta2 and hit_boundary:
        return min(params.alpha2 * radius, params.delta_max)
    return radius


def _assemble_duals(p: NlpProblem, sol, lower, upper):
    """Map LP duals back onto the problem's inequality rows.

    General rows take the LP row duals directly; box rows recover theirs from
    the reduced costs at the active bound. Bounds that exist only because of
    the trust region carry no problem multiplier and are dropped.
    """
    box_lower, box_upper, lower_row, upper_row, general_rows = p.box_bounds()
    pi = np.zeros(p.n_b)
    pi[general_rows] = sol.duals_ineq
    w = sol.primal
    rc = sol.reduced_costs
    for j in range(p.n_w):
        tol = 1e-9 * (1.0 + abs(w[j]))
        if (upper_row[j] >= 0 and abs(w[j] - box_upper[j]) <= tol
                and abs(upper[j] - box_upper[j]) <= tol):
            coef = p.ineq_matrix[upper_row[j], j]
            pi[upper_row[j]] = max(0.0, -rc[j]) / coef
        elif (lower_row[j] >= 0 and abs(w[j] - box_lower[j]) <= tol
                and abs(lower[j] - box_lower[j]) <= tol):
            coef = p.ineq_matrix[lower_row[j], j]
            pi[lower_row[j]] = max(0.0, rc[j]) / (-coef)
    return sol.duals_eq.copy(), pi


def solve(p: NlpProblem, w0: np.ndarray, params: Optional[SolverParams] = None,
          tol: Optional[ToleranceSet] = None) -> SolveResult:
    """Run the outer loop from a feasible starting point.

    The start must satisfy the inner feasibility tolerance; mildly infeasible
    starts (up to 1e-3) get one repair attempt with the inner iterations
    before being rejected.
    """
    params = params or SolverParams()
    w0 = np.asarray(w0, dtype=float).copy()
    h0 = infeasibility(p, w0)
    if h0 > params.inner.sigma_inner:
        if h0 > 1e-3:
            raise InfeasibleStartError(
                f"starting point infeasibility {h0:.3e} exceeds the repairable range")
        lin0 = linearize(p, w0)
        repaired, _ = run_inner(p, lin0, w0, w0, params.delta0, params.inner, tol=tol)
        if repaired is None:
            raise InfeasibleStartError(
                f"starting point infeasibility {h0:.3e} could not be repaired")
        w0 = repaired

    w_hat = w0
    radius = params.delta0
    yi = p.partition.y_indices
    history: list = []
    traces: list = []
    points: list = []
    status = SolveStatus.MAX_ITERATIONS
    final_duals = (np.zeros(p.n_g), np.zeros(p.n_b))
    carry_basis = None  # warm start across outer iterations

    for k in range(params.max_outer_iterations):
        lin = linearize(p, w_hat)
        eq_res, ineq_act = infeasibility_parts(p, w_hat, lin.g_at_base)
        h_k = float(np.abs(eq_res).max()) if eq_res.size else 0.0
        if ineq_act.size:
            h_k += float(np.maximum(ineq_act, 0.0).max())
        lp6 = build_trust_region_lp(lin, p, radius)
        sol = solve_lp(lp6, tol, start_basis=carry_basis)
        carry_basis = sol.basis
        if sol.status is not LpStatus.OPTIMAL:
            raise SubproblemError(
                f"trust-region LP at a feasible iterate returned {sol.status.value}")
        w_bar = sol.primal
        model = float(p.cost @ (w_bar - w_hat))
        step_norm = float(np.abs(w_bar[yi] - w_hat[yi]).max(initial=0.0))
        points.append(w_hat.copy())

        # One-sided stop: the LP model fails to predict a decrease beyond the
        # threshold. At an exactly feasible iterate the model change is never
        # positive; a positive value only arises from tolerance-level iterate
        # infeasibility, and continuing then would accept an objective
        # increase, so both cases terminate here.
        if model >= -params.sigma_outer:
            history.append(IterationRecord(
                k=k, objective=float(p.cost @ w_hat), infeasibility=h_k,
                radius=radius, model_decrease=model, rho=None, accepted=False,
                inner_iterations=0, inner_status=InnerStatus.NOT_RUN,
                step_norm=step_norm, lp_pivot_rule=sol.pivot_rule))
            traces.append(None)
            final_duals = _assemble_duals(p, sol, lp6.lower, lp6.upper)
            status = SolveStatus.OPTIMAL
            break

        w_tilde, trace = run_inner(p, lin, w_hat, w_bar, radius, params.inner,
                                   start_basis=sol.basis, tol=tol)
        traces.append(trace)
        if w_tilde is None:
            new_radius = params.alpha1 * step_norm
            history.append(IterationRecord(
                k=k, objective=float(p.cost @ w_hat), infeasibility=h_k,
                radius=radius, model_decrease=model, rho=None, accepted=False,
                inner_iterations=trace.plp_solves, inner_status=trace.status,
                step_norm=step_norm,
                projection_ratio=trace.rows[-1].ratio if trace.rows else None,
                lp_pivot_rule=sol.pivot_rule))
            if new_radius < params.radius_floor:
                final_duals = _assemble_duals(p, sol, lp6.lower, lp6.upper)
                status = SolveStatus.INNER_FAILURE_STALL
                break
            radius = new_radius
            continue

        rho = tr_ratio(p.cost, w_hat, w_bar, w_tilde)
        hit_boundary = step_norm >= radius * (1.0 - 1e-9)
        accepted = rho > params.sigma
        history.append(IterationRecord(
            k=k, objective=float(p.cost @ w_hat), infeasibility=h_k,
            radius=radius, model_decrease=model, rho=rho, accepted=accepted,
            inner_iterations=trace.plp_solves, inner_status=trace.status,
            step_norm=step_norm,
            projection_ratio=trace.rows[-1].ratio if trace.rows else None,
            lp_pivot_rule=sol.pivot_rule))
        radius = update_radius(params, rho, step_norm, radius, hit_boundary)
        final_duals = _assemble_duals(p, sol, lp6.lower, lp6.upper)
        if accepted:
            w_hat = w_tilde
            if trace.final_basis is not None:
                carry_basis = trace.final_basis

    return SolveResult(status=status, final_point=w_hat, final_duals=final_duals,
                       history=history, inner_traces=traces, points=points)

"""Inner feasibility iterations: project a trust-region LP step back onto the
feasible set by re-solving parametric LPs with re-evaluated constraint
residuals (zero-order information only; the Jacobian stays frozen).

Each iterate solves

    minimize    cost @ w
    subject to  delta_l + eq_linear @ w + g(y_hat) + G (w - w_hat) = 0
                ineq rows of the problem
                |w_y - w_hat_y|_inf <= Delta (non-slack components only)

where delta_l re-measures the linearization error at the current iterate.
With delta_l = 0 this is exactly the outer trust-region LP; started at the LP
step it performs a second-order correction first and higher-order corrections
after that. A watchdog aborts runs that contract too slowly or drift past the
projection-ratio gate, in which case the outer loop shrinks the radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .lp import LpBasis, LpProblem, LpStatus, ToleranceSet, solve_lp
from .nlp import Linearization, NlpProblem, eval_g, infeasibility_parts


class InnerStatus(Enum):
    CONVERGED = "converged"
    WATCHDOG = "watchdog"
    RATIO_EXCEEDED = "ratio_exceeded"
    MAX_ITER = "max_iter"
    NOT_RUN = "not_run"  # used by outer-iteration records only


@dataclass(frozen=True)
class InnerParams:
    """Tuning constants of the feasibility iterations."""

    sigma_inner: float = 1e-7
    n_watch: int = 5
    kappa_watch: float = 0.3
    n_max: int = 50
    ratio_abort: float = 1.0
    ratio_accept: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.sigma_inner < 1e-5:
            raise ValueError("sigma_inner must lie in (0, 1e-5)")
        if not 0.0 < self.kappa_watch < 1.0:
            raise ValueError("kappa_watch must lie in (0, 1)")
        if not self.ratio_accept < self.ratio_abort:
            raise ValueError("ratio_accept must be below ratio_abort")
        if self.n_watch < 1 or self.n_max < 1:
            raise ValueError("n_watch and n_max must be positive")


@dataclass
class InnerRow:
    l: int
    infeasibility: float
    ratio: float
    kappa: Optional[float] = None


@dataclass
class InnerTrace:
    rows: list = field(default_factory=list)
    status: InnerStatus = InnerStatus.MAX_ITER
    detail: str = ""
    plp_solves: int = 0
    final_basis: object = None  # basis of the last parametric LP solve


def delta(w_l: np.ndarray, w_hat: np.ndarray, lin: Linearization,
          p: NlpProblem) -> np.ndarray:
    """Linearization error g(y_l) - g(y_hat) - G(w_l - w_hat); zero at the
    base point and identically zero for linear g."""
    w_l = np.asarray(w_l, dtype=float)
    w_hat = np.asarray(w_hat, dtype=float)
    g_l = eval_g(p, p.partition.select_y(w_l))
    return g_l - lin.g_at_base - lin.fixed_jacobian @ (w_l - w_hat)


def build_plp(delta_l: np.ndarray, lin: Linearization, p: NlpProblem,
              radius: float) -> LpProblem:
    """Parametric LP at the frozen linearization, shifted by delta_l.

    Box rows of the problem are folded into variable bounds and intersected
    with the trust region on the non-slack components; remaining inequality
    rows pass through unchanged. With delta_l = 0 the result is byte for byte
    the outer trust-region LP.
    """
    if radius <= 0.0:
        raise ValueError("trust-region radius must be positive")
    w_hat = lin.base_point
    box_lower, box_upper, _, _, general_rows = p.box_bounds()
    lower = box_lower.copy()
    upper = box_upper.copy()
    yi = p.partition.y_indices
    lower[yi] = np.maximum(lower[yi], w_hat[yi] - radius)
    upper[yi] = np.minimum(upper[yi], w_hat[yi] + radius)
    return LpProblem(
        cost=p.cost,
        eq_matrix=p.eq_linear + lin.fixed_jacobian,
        eq_rhs=lin.g_at_base - lin.fixed_jacobian @ w_hat + delta_l,
        ineq_matrix=p.ineq_matrix[general_rows],
        ineq_rhs=p.ineq_rhs[general_rows],
        lower=lower,
        upper=upper,
    )


def contraction_estimate(w_next: np.ndarray, w_cur: np.ndarray,
                         w_prev: np.ndarray) -> float:
    """Ratio of successive step lengths (Euclidean)."""
    den = float(np.linalg.norm(np.asarray(w_cur) - np.asarray(w_prev)))
    if den == 0.0:
        raise ZeroDivisionError("contraction rate undefined for identical iterates")
    return float(np.linalg.norm(np.asarray(w_next) - np.asarray(w_cur))) / den


def geometric_mean_kappa(values) -> float:
    """Per-step contraction summary of a run (used for radius comparisons)."""
    logs = [math.log(v) if v > 0 else -745.0 for v in values]
    return math.exp(sum(logs) / len(logs))


def _window_contraction(values) -> float:
    """Total shrink factor across a watchdog window (product of step ratios)."""
    out = 1.0
    for v in values:
        out *= v
    return out


def run_inner(p: NlpProblem, lin: Linearization, w_hat: np.ndarray,
              w_bar: np.ndarray, radius: float, params: InnerParams,
              start_basis: Optional[LpBasis] = None,
              tol: Optional[ToleranceSet] = None):
    """Drive the iterates from the LP step w_bar to a feasible point.

    Returns (w_tilde, trace) on success -- the point then satisfies the
    feasibility tolerance and the projection-ratio gate -- or (None, trace)
    on any abort, in which case the caller shrinks the radius.
    """
    w_hat = np.asarray(w_hat, dtype=float)
    w_bar = np.asarray(w_bar, dtype=float)
    denom = float(np.linalg.norm(w_bar - w_hat))
    trace = InnerTrace()
    w_l = w_bar
    basis = start_basis
    prev_step = None
    kappas: list = []
    l = 0
    while True:
        g_val = eval_g(p, p.partition.select_y(w_l))
        eq_res, ineq_act = infeasibility_parts(p, w_l, g_val)
        h_l = float(np.abs(eq_res).max()) if eq_res.size else 0.0
        if ineq_act.size:
            h_l += float(np.maximum(ineq_act, 0.0).max())
        ratio_l = 0.0 if denom == 0.0 else float(np.linalg.norm(w_bar - w_l)) / denom
        trace.rows.append(InnerRow(l=l, infeasibility=h_l, ratio=ratio_l))
        if h_l <= params.sigma_inner and ratio_l < params.ratio_accept:
            trace.status = InnerStatus.CONVERGED
            return w_l, trace
        if ratio_l > params.ratio_abort:
            trace.status = InnerStatus.RATIO_EXCEEDED
            return None, trace
        if len(kappas) >= params.n_watch:
            # Contraction achieved across the last n_watch steps (product of
            # the step ratios). Degenerate-face transients can push single
            # step ratios near one while the window still shrinks strongly;
            # the windowed total keeps those runs alive and still kills
            # genuinely non-contracting ones.
            window = _window_contraction(kappas[-params.n_watch:])
            if not (window < params.kappa_watch and ratio_l < params.ratio_accept):
                trace.status = InnerStatus.WATCHDOG
                return None, trace
        if l >= params.n_max:
            trace.status = InnerStatus.MAX_ITER
            return None, trace
        delta_l = g_val - lin.g_at_base - lin.fixed_jacobian @ (w_l - w_hat)
        plp = build_plp(delta_l, lin, p, radius)
        sol = solve_lp(plp, tol, start_basis=basis)
        trace.plp_solves += 1
        if sol.status is not LpStatus.OPTIMAL:
            trace.status = InnerStatus.RATIO_EXCEEDED
            trace.detail = f"plp_{sol.status.value}"
            return None, trace
        basis = sol.basis
        trace.final_basis = sol.basis
        w_next = sol.primal
        yi = p.partition.y_indices
        assert float(np.abs(w_next[yi] - w_hat[yi]).max(initial=0.0)) <= radius * (1 + 1e-9) + 1e-12
        step = float(np.linalg.norm(w_next - w_l))
        if prev_step is not None and prev_step > 0.0:
            trace.rows[-1].kappa = step / prev_step
            kappas.append(step / prev_step)
        if step == 0.0:
            # Fixed point of the parametric LP which fails the stop test:
            # no further progress is possible at this radius.
            trace.status = (InnerStatus.RATIO_EXCEEDED
                            if ratio_l >= params.ratio_accept else InnerStatus.WATCHDOG)
            trace.detail = "stalled"
            return None, trace
        prev_step = step
        w_l = w_next
        l += 1

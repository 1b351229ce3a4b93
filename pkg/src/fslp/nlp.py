"""Canonical nonlinear program with linear cost, linear inequalities, and
nonlinear equalities acting on the non-slack variables.

    minimize    cost @ w
    subject to  eq_linear @ w + g(w[y_indices]) = 0
                ineq_matrix @ w + ineq_rhs <= 0

The decision vector splits into non-slack variables y and slack variables
s = (s_ocp, s_nlp); ``g`` and its Jacobian see only y. All box constraints
live inside the inequality rows, which keeps the problem statement uniform;
single-coefficient rows are recognized once at construction so subproblem
builders can fold them into variable bounds.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .lp import LpProblem, LpStatus, ToleranceSet, solve_lp


class EvaluationError(RuntimeError):
    """A constraint evaluation produced NaN or failed outright."""


class InfeasibleSlackError(ValueError):
    """No slack assignment can satisfy the constraints for the given y."""


@dataclass(frozen=True)
class VariablePartition:
    """Index split of the decision vector into y, penalized, and
    reformulation slacks. The three lists are disjoint and cover 0..n_w-1."""

    n_w: int
    y_indices: np.ndarray
    s_ocp_indices: np.ndarray
    s_nlp_indices: np.ndarray

    def __post_init__(self):
        for name in ("y_indices", "s_ocp_indices", "s_nlp_indices"):
            arr = np.asarray(getattr(self, name), dtype=int).ravel()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        allidx = np.concatenate([self.y_indices, self.s_ocp_indices, self.s_nlp_indices])
        if allidx.size != self.n_w or np.unique(allidx).size != self.n_w:
            raise ValueError("partition index lists must be disjoint and cover 0..n_w-1")
        if allidx.size and (allidx.min() < 0 or allidx.max() >= self.n_w):
            raise ValueError("partition indices out of range")

    @property
    def n_y(self) -> int:
        return self.y_indices.size

    @property
    def s_indices(self) -> np.ndarray:
        """Slack indices in (s_ocp, s_nlp) order."""
        return np.concatenate([self.s_ocp_indices, self.s_nlp_indices])

    def select_y(self, w: np.ndarray) -> np.ndarray:
        return np.asarray(w, dtype=float)[self.y_indices]

    def embed_into_w(self, jac_rows_y: np.ndarray) -> np.ndarray:
        """Scatter an (n_g, n_y) matrix into the (n_g, n_w) column layout."""
        out = np.zeros((jac_rows_y.shape[0], self.n_w))
        out[:, self.y_indices] = jac_rows_y
        return out


@dataclass(frozen=True)
class NlpProblem:
    """Problem data; immutable after construction, callbacks must be reentrant.

    ``g_jacobian(y)`` returns the gradient-stacked matrix of shape
    (n_y, n_g), i.e. column j holds the gradient of the j-th equality.
    """

    cost: np.ndarray
    eq_linear: np.ndarray
    ineq_matrix: np.ndarray
    ineq_rhs: np.ndarray
    g: Callable[[np.ndarray], np.ndarray]
    g_jacobian: Callable[[np.ndarray], np.ndarray]
    partition: VariablePartition
    check_ineq_rank: bool = True

    def __post_init__(self):
        n_w = self.partition.n_w
        c = np.array(self.cost, dtype=float).ravel()
        C = np.array(self.eq_linear, dtype=float)
        A = np.array(self.ineq_matrix, dtype=float)
        b = np.array(self.ineq_rhs, dtype=float).ravel()
        if c.size != n_w or C.shape[1] != n_w or A.shape[1] != n_w:
            raise ValueError("cost/matrix widths must equal n_w")
        if A.shape[0] != b.size:
            raise ValueError("ineq_rhs length must match ineq_matrix rows")
        for arr in (c, C, A, b):
            arr.flags.writeable = False
        object.__setattr__(self, "cost", c)
        object.__setattr__(self, "eq_linear", C)
        object.__setattr__(self, "ineq_matrix", A)
        object.__setattr__(self, "ineq_rhs", b)
        if self.check_ineq_rank and A.shape[0]:
            if np.linalg.matrix_rank(A) < A.shape[0]:
                warnings.warn("ineq_matrix does not have full row rank",
                              stacklevel=2)
        object.__setattr__(self, "_box_info", _classify_box_rows(A, b))

    @property
    def n_w(self) -> int:
        return self.partition.n_w

    @property
    def n_g(self) -> int:
        return self.eq_linear.shape[0]

    @property
    def n_b(self) -> int:
        return self.ineq_rhs.size

    def box_bounds(self):
        """Tightest per-variable bounds implied by single-coefficient rows,
        plus the indices of the remaining general rows.

        Returns (lower, upper, lower_row, upper_row, general_rows); row index
        arrays hold -1 where no box row applies.
        """
        return self._box_info  # type: ignore[attr-defined]


def _classify_box_rows(A: np.ndarray, b: np.ndarray):
    n_b, n_w = A.shape
    lower = np.full(n_w, -np.inf)
    upper = np.full(n_w, np.inf)
    lower_row = np.full(n_w, -1, dtype=int)
    upper_row = np.full(n_w, -1, dtype=int)
    general = []
    for i in range(n_b):
        nz = np.nonzero(A[i])[0]
        if nz.size != 1:
            general.append(i)
            continue
        j = int(nz[0])
        coef = A[i, j]
        val = -b[i] / coef
        if coef > 0:  # coef * w_j + b_i <= 0  ->  w_j <= val
            if val < upper[j]:
                upper[j] = val
                upper_row[j] = i
        else:  # w_j >= val
            if val > lower[j]:
                lower[j] = val
                lower_row[j] = i
    for arr in (lower, upper, lower_row, upper_row):
        arr.flags.writeable = False
    general_rows = np.asarray(general, dtype=int)
    general_rows.flags.writeable = False
    return lower, upper, lower_row, upper_row, general_rows


@dataclass(frozen=True)
class Linearization:
    """Constraint linearization data frozen at a base point."""

    base_point: np.ndarray
    fixed_jacobian: np.ndarray  # (n_g, n_w): Jacobian of g embedded into w columns
    g_at_base: np.ndarray

    def __post_init__(self):
        for name in ("base_point", "fixed_jacobian", "g_at_base"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def eval_g(p: NlpProblem, y: np.ndarray) -> np.ndarray:
    val = np.asarray(p.g(y), dtype=float).ravel()
    if val.size != p.n_g:
        raise EvaluationError(f"g returned {val.size} values, expected {p.n_g}")
    if not np.all(np.isfinite(val)):
        raise EvaluationError("g evaluation produced non-finite values")
    return val


def infeasibility_parts(p: NlpProblem, w: np.ndarray,
                        g_val: Optional[np.ndarray] = None):
    """Equality residual and inequality activation vectors at w."""
    w = np.asarray(w, dtype=float)
    if g_val is None:
        g_val = eval_g(p, p.partition.select_y(w))
    eq_res = p.eq_linear @ w + g_val
    ineq_act = p.ineq_matrix @ w + p.ineq_rhs
    if not (np.all(np.isfinite(eq_res)) and np.all(np.isfinite(ineq_act))):
        raise EvaluationError("constraint residuals are non-finite")
    return eq_res, ineq_act


def infeasibility(p: NlpProblem, w: np.ndarray,
                  g_val: Optional[np.ndarray] = None) -> float:
    """Infeasibility measure: max-norm equality residual plus max-norm
    positive part of the inequality activations. Zero exactly on the
    feasible set."""
    eq_res, ineq_act = infeasibility_parts(p, w, g_val)
    h = float(np.abs(eq_res).max()) if eq_res.size else 0.0
    if ineq_act.size:
        h += float(np.maximum(ineq_act, 0.0).max())
    return h


def linearize(p: NlpProblem, w_hat: np.ndarray) -> Linearization:
    """Freeze the constraint Jacobian at w_hat."""
    w_hat = np.asarray(w_hat, dtype=float)
    y = p.partition.select_y(w_hat)
    g_val = eval_g(p, y)
    jac = np.asarray(p.g_jacobian(y), dtype=float)
    if jac.shape != (p.partition.n_y, p.n_g):
        raise EvaluationError(
            f"g_jacobian returned shape {jac.shape}, expected {(p.partition.n_y, p.n_g)}")
    if not np.all(np.isfinite(jac)):
        raise EvaluationError("g_jacobian produced non-finite values")
    fixed = p.partition.embed_into_w(jac.T)
    return Linearization(base_point=w_hat, fixed_jacobian=fixed, g_at_base=g_val)


def minimal_slack(p: NlpProblem, y: np.ndarray,
                  tol: Optional[ToleranceSet] = None) -> np.ndarray:
    """Cheapest slack assignment for a fixed y, in (s_ocp, s_nlp) order.

    Solves the slack-column LP: minimize the slack part of the cost subject
    to every constraint with y frozen. Raises InfeasibleSlackError when no
    slack can repair the constraints (e.g. a y-only row is violated).
    """
    part = p.partition
    y = np.asarray(y, dtype=float)
    if y.size != part.n_y:
        raise ValueError(f"y has length {y.size}, expected {part.n_y}")
    s_idx = part.s_indices
    w_y = np.zeros(p.n_w)
    w_y[part.y_indices] = y
    g_val = eval_g(p, y)
    ns = s_idx.size
    sub = LpProblem(
        cost=p.cost[s_idx],
        eq_matrix=p.eq_linear[:, s_idx],
        eq_rhs=p.eq_linear @ w_y + g_val,
        ineq_matrix=p.ineq_matrix[:, s_idx],
        ineq_rhs=p.ineq_matrix @ w_y + p.ineq_rhs,
        lower=np.full(ns, -np.inf),
        upper=np.full(ns, np.inf),
    )
    sol = solve_lp(sub, tol)
    if sol.status is LpStatus.INFEASIBLE:
        raise InfeasibleSlackError("no feasible slack assignment for the given y")
    if sol.status is not LpStatus.OPTIMAL:
        raise InfeasibleSlackError(f"slack subproblem ended with status {sol.status.value}")
    return sol.primal


def assemble_w(p: NlpProblem, y: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Interleave y and (s_ocp, s_nlp) back into a full decision vector."""
    part = p.partition
    w = np.zeros(p.n_w)
    w[part.y_indices] = y
    w[part.s_indices] = s
    return w


def kkt_residual(p: NlpProblem, w: np.ndarray, lam: np.ndarray,
                 pi: np.ndarray) -> float:
    """Max-norm residual of the first-order optimality system at (w, lam, pi).

    Diagnostic only: stationarity of the Lagrangian, equality residual,
    inequality violation, and complementarity.
    """
    w = np.asarray(w, dtype=float)
    lam = np.asarray(lam, dtype=float).ravel()
    pi = np.asarray(pi, dtype=float).ravel()
    lin = linearize(p, w)
    stat = p.cost + (p.eq_linear + lin.fixed_jacobian).T @ lam + p.ineq_matrix.T @ pi
    eq_res, ineq_act = infeasibility_parts(p, w, lin.g_at_base)
    res = float(np.abs(stat).max())
    if eq_res.size:
        res = max(res, float(np.abs(eq_res).max()))
    if ineq_act.size:
        res = max(res, float(np.maximum(ineq_act, 0.0).max()))
        res = max(res, float(np.abs(pi * ineq_act).max()))
    return res


def validate_jacobian(p: NlpProblem, points, step: float = 1e-6) -> float:
    """Max deviation between the analytic Jacobian and central differences of
    g over the supplied y points. Never called inside the solve loop."""
    worst = 0.0
    for y in points:
        y = np.asarray(y, dtype=float)
        jac = np.asarray(p.g_jacobian(y), dtype=float)  # (n_y, n_g)
        for j in range(y.size):
            e = np.zeros_like(y)
            e[j] = step
            fd = (eval_g(p, y + e) - eval_g(p, y - e)) / (2.0 * step)
            worst = max(worst, float(np.abs(fd - jac[j]).max()))
    return worst

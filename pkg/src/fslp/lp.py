"""Dense simplex solver for small linear programs with box bounds.

Problem form:

    minimize    cost @ w
    subject to  eq_matrix @ w + eq_rhs = 0
                ineq_matrix @ w + ineq_rhs <= 0
                lower <= w <= upper          (entries may be -inf / +inf)

Cold solves run a two-phase bounded-variable revised primal simplex with an
explicit dense basis inverse (Dantzig pricing, Bland's rule after a degeneracy
streak). When a starting basis from a previous solution is supplied and is
still dual feasible -- the common case when only the right-hand side changed --
the solve goes through a bounded-variable dual simplex instead and typically
needs only a few pivots. Pivoting is fully deterministic: re-solving the same
problem with the same arguments reproduces the result bit for bit.

Everything is dense; intended problem sizes are a few hundred variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

# Nonbasic variable states.
_BASIC = 0
_AT_LOWER = 1
_AT_UPPER = 2
_FREE = 3


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


class LpInputError(ValueError):
    """Malformed LP data (inconsistent shapes, NaN entries, crossed bounds)."""


@dataclass(frozen=True)
class ToleranceSet:
    """Numerical tolerances and the pivot budget for one solve."""

    feas_tol: float = 1e-9
    dual_tol: float = 1e-9
    comp_tol: float = 1e-9
    pivot_tol: float = 1e-10
    max_pivots: int = 50_000


def _as_matrix(a, rows, cols, name):
    m = np.asarray(a, dtype=float)
    if m.size == 0:
        m = m.reshape(rows if rows is not None else 0, cols)
    if m.ndim != 2 or m.shape[1] != cols or (rows is not None and m.shape[0] != rows):
        raise LpInputError(f"{name} has shape {m.shape}, expected (*, {cols})")
    return m


@dataclass(frozen=True)
class LpProblem:
    """Immutable LP data. Arrays are copied and marked read-only."""

    cost: np.ndarray
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    ineq_matrix: np.ndarray
    ineq_rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        c = np.array(self.cost, dtype=float).ravel()
        n = c.size
        E = _as_matrix(self.eq_matrix, None, n, "eq_matrix")
        e = np.array(self.eq_rhs, dtype=float).ravel()
        A = _as_matrix(self.ineq_matrix, None, n, "ineq_matrix")
        b = np.array(self.ineq_rhs, dtype=float).ravel()
        lo = np.array(self.lower, dtype=float).ravel()
        up = np.array(self.upper, dtype=float).ravel()
        if e.size != E.shape[0]:
            raise LpInputError("eq_rhs length does not match eq_matrix rows")
        if b.size != A.shape[0]:
            raise LpInputError("ineq_rhs length does not match ineq_matrix rows")
        if lo.size != n or up.size != n:
            raise LpInputError("bound vectors must match cost length")
        for name, arr in (("cost", c), ("eq_matrix", E), ("eq_rhs", e),
                          ("ineq_matrix", A), ("ineq_rhs", b)):
            if not np.all(np.isfinite(arr)):
                raise LpInputError(f"{name} contains non-finite entries")
        if np.any(np.isnan(lo)) or np.any(np.isnan(up)):
            raise LpInputError("bounds contain NaN")
        if np.any(lo == np.inf) or np.any(up == -np.inf):
            raise LpInputError("bounds leave no attainable values")
        if np.any(lo > up):
            raise LpInputError("lower bound exceeds upper bound")
        for name, arr in (("cost", c), ("eq_matrix", E), ("eq_rhs", e),
                          ("ineq_matrix", A), ("ineq_rhs", b),
                          ("lower", lo), ("upper", up)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n_vars(self) -> int:
        return self.cost.size

    @property
    def n_eq(self) -> int:
        return self.eq_rhs.size

    @property
    def n_ineq(self) -> int:
        return self.ineq_rhs.size


@dataclass(frozen=True)
class LpBasis:
    """Basis snapshot for warm starts: basic column ids plus nonbasic states.

    Columns are indexed structural-first, then one slack per inequality row.
    """

    basic: np.ndarray
    nonbasic_state: np.ndarray


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    primal: np.ndarray
    duals_eq: np.ndarray
    duals_ineq: np.ndarray
    objective: float
    reduced_costs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    basis: Optional[LpBasis] = None
    pivots: int = 0
    pivot_rule: str = ""


class _Simplex:
    """Bounded-variable revised simplex on the standardized column set.

    Columns: [structural (n) | slacks (mi) | artificials (m)]. Artificial
    columns are sign-flipped unit columns; outside phase I their bounds are
    pinned to [0, 0] so they can never re-enter.
    """

    REFACTOR_EVERY = 100
    BLAND_TRIGGER = 40

    def __init__(self, p: LpProblem, tol: ToleranceSet):
        self.p = p
        self.tol = tol
        n, me, mi = p.n_vars, p.n_eq, p.n_ineq
        self.n, self.me, self.mi = n, me, mi
        self.m = me + mi
        self.nt = n + mi  # structural + slack
        self.ncol = self.nt + self.m

        M = np.zeros((self.m, self.ncol))
        if me:
            M[:me, :n] = p.eq_matrix
        if mi:
            M[me:, :n] = p.ineq_matrix
            M[me:, n:self.nt] = np.eye(mi)
        self.M = M  # artificial block filled at cold start
        self.d = np.concatenate([-p.eq_rhs, -p.ineq_rhs])

        self.lb = np.concatenate([p.lower, np.zeros(mi), np.zeros(self.m)])
        self.ub = np.concatenate([p.upper, np.full(mi, np.inf), np.zeros(self.m)])

        self.cost2 = np.zeros(self.ncol)
        self.cost2[:n] = p.cost

        self.basis = np.zeros(self.m, dtype=int)
        self.state = np.full(self.ncol, _AT_LOWER, dtype=np.int8)
        self.Binv = np.eye(self.m)
        self.x_b = np.zeros(self.m)

        self.pivots = 0
        self._since_refactor = 0
        self._degen_streak = 0
        self._use_bland = False
        self._has_artificial_in_basis = False

        self.feas_scale = tol.feas_tol * (1.0 + (np.abs(self.d).max() if self.m else 0.0))
        self._colscale = np.maximum(np.abs(M).max(axis=0), 1.0) if self.m else np.ones(self.ncol)

    # -- basic plumbing -----------------------------------------------------

    def _default_state(self, j):
        if np.isfinite(self.lb[j]):
            return _AT_LOWER
        if np.isfinite(self.ub[j]):
            return _AT_UPPER
        return _FREE

    def _nonbasic_values(self):
        vals = np.zeros(self.ncol)
        at_lo = self.state == _AT_LOWER
        at_up = self.state == _AT_UPPER
        vals[at_lo] = self.lb[at_lo]
        vals[at_up] = self.ub[at_up]
        return vals

    def _refactorize(self):
        B = self.M[:, self.basis]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
            raise RuntimeError("simplex basis became singular") from exc
        vals = self._nonbasic_values()
        vals[self.basis] = 0.0
        self.x_b = self.Binv @ (self.d - self.M @ vals)
        self._since_refactor = 0

    def _point(self):
        vals = self._nonbasic_values()
        vals[self.basis] = self.x_b
        return vals

    def _price(self, cost):
        y = cost[self.basis] @ self.Binv
        rc = cost - y @ self.M
        return y, rc

    def _dual_tols(self, cost, y):
        ynorm = np.abs(y).max() if y.size else 0.0
        return self.tol.dual_tol * (1.0 + np.abs(cost) + ynorm * self._colscale)

    def _eta_update(self, alpha, r):
        piv = alpha[r]
        a = alpha.copy()
        a[r] -= 1.0
        self.Binv -= np.outer(a, self.Binv[r] / piv)
        self._since_refactor += 1
        self.pivots += 1

    # -- primal simplex -----------------------------------------------------

    def _violations(self, rc, tols):
        movable = (self.ub - self.lb) > 0
        viol = np.zeros(self.ncol)
        sel = (self.state == _AT_LOWER) & movable & (rc < -tols)
        viol[sel] = -rc[sel]
        sel = (self.state == _AT_UPPER) & movable & (rc > tols)
        viol[sel] = rc[sel]
        sel = (self.state == _FREE) & (np.abs(rc) > tols)
        viol[sel] = np.abs(rc[sel])
        return viol

    def _ratio_test(self, alpha, dirn, q):
        # Basic variables move as x_b - t * dirn * alpha, t >= 0.
        coef = dirn * alpha
        ptol = self.tol.pivot_tol
        lb_b = self.lb[self.basis]
        ub_b = self.ub[self.basis]
        with np.errstate(divide="ignore", invalid="ignore"):
            t_lo = np.where((coef > ptol) & np.isfinite(lb_b),
                            (self.x_b - lb_b) / coef, np.inf)
            t_up = np.where((coef < -ptol) & np.isfinite(ub_b),
                            (self.x_b - ub_b) / coef, np.inf)
        t_lo = np.maximum(t_lo, 0.0)
        t_up = np.maximum(t_up, 0.0)
        t_rows = np.minimum(t_lo, t_up)  # at most one side is finite per row
        t_best = float(t_rows.min()) if self.m else np.inf
        t_own = self.ub[q] - self.lb[q]
        if np.isfinite(t_own) and t_own < t_best - 1e-12:
            return t_own, -1, False
        if not np.isfinite(t_best):
            return t_best, -1, False
        tied = t_rows <= t_best + 1e-12
        # Among ties prefer the largest pivot magnitude, then the lowest row.
        score = np.where(tied, np.abs(coef), -1.0)
        blocker = int(np.argmax(score))
        hit_upper = t_up[blocker] <= t_lo[blocker]
        return float(t_rows[blocker]), blocker, bool(hit_upper)

    def _primal_loop(self, cost):
        while True:
            if self.pivots >= self.tol.max_pivots:
                return LpStatus.ITERATION_LIMIT
            if self._since_refactor >= self.REFACTOR_EVERY:
                self._refactorize()
            y, rc = self._price(cost)
            tols = self._dual_tols(cost, y)
            viol = self._violations(rc, tols)
            if not np.any(viol > 0):
                return LpStatus.OPTIMAL
            if self._use_bland:
                q = int(np.nonzero(viol > 0)[0][0])
            else:
                q = int(np.argmax(viol))
            if self.state[q] == _AT_UPPER:
                dirn = -1.0
            elif self.state[q] == _FREE:
                dirn = 1.0 if rc[q] < 0 else -1.0
            else:
                dirn = 1.0
            alpha = self.Binv @ self.M[:, q]
            t, blocker, hit_upper = self._ratio_test(alpha, dirn, q)
            if not np.isfinite(t):
                return LpStatus.UNBOUNDED
            # Degeneracy bookkeeping drives the Bland fallback.
            if t <= 1e-11:
                self._degen_streak += 1
                if self._degen_streak >= self.BLAND_TRIGGER:
                    self._use_bland = True
            else:
                self._degen_streak = 0
                self._use_bland = False
            old_state = self.state[q]
            start_val = (self.lb[q] if old_state == _AT_LOWER
                         else self.ub[q] if old_state == _AT_UPPER else 0.0)
            self.x_b -= t * dirn * alpha
            if blocker < 0:
                # Bound flip: entering variable runs to its opposite bound.
                self.state[q] = _AT_UPPER if dirn > 0 else _AT_LOWER
                self.pivots += 1
                continue
            leaving = self.basis[blocker]
            self.state[leaving] = _AT_UPPER if hit_upper else _AT_LOWER
            self.state[q] = _BASIC
            self.basis[blocker] = q
            self.x_b[blocker] = start_val + dirn * t
            self._eta_update(alpha, blocker)

    # -- dual simplex (warm starts) -----------------------------------------

    def _dual_loop(self, cost):
        """Restore primal feasibility while keeping dual feasibility.

        Reduced costs are maintained incrementally and refreshed at every
        refactorization. Returns OPTIMAL when primal feasible (caller then
        polishes with the primal loop), INFEASIBLE when the dual is
        unbounded, ITERATION_LIMIT when the dual budget trips (warm starts
        then fall back to the cold path).
        """
        ptol = self.tol.pivot_tol
        budget = min(self.tol.max_pivots, 4 * self.m + 200)
        steps = 0
        stalled = 0
        _, rc = self._price(cost)
        while True:
            if steps >= budget or stalled > 50:
                return LpStatus.ITERATION_LIMIT
            steps += 1
            if self._since_refactor >= self.REFACTOR_EVERY:
                self._refactorize()
                _, rc = self._price(cost)
            lb_b = self.lb[self.basis]
            ub_b = self.ub[self.basis]
            below = np.where(np.isfinite(lb_b), lb_b - self.x_b, -np.inf)
            above = np.where(np.isfinite(ub_b), self.x_b - ub_b, -np.inf)
            viol = np.maximum(below, above)
            r = int(np.argmax(viol)) if self.m else 0
            if self.m == 0 or viol[r] <= self.feas_scale:
                return LpStatus.OPTIMAL
            leave_at_upper = above[r] >= below[r]
            row = self.Binv[r] @ self.M
            movable = (self.ub - self.lb) > 0
            movable[self.basis] = False
            if leave_at_upper:
                elig = ((self.state == _AT_LOWER) & (row > ptol)) | \
                       ((self.state == _AT_UPPER) & (row < -ptol)) | \
                       ((self.state == _FREE) & (np.abs(row) > ptol))
            else:
                elig = ((self.state == _AT_LOWER) & (row < -ptol)) | \
                       ((self.state == _AT_UPPER) & (row > ptol)) | \
                       ((self.state == _FREE) & (np.abs(row) > ptol))
            elig &= movable
            if not np.any(elig):
                return LpStatus.INFEASIBLE
            with np.errstate(divide="ignore", invalid="ignore"):
                theta = np.where(elig, np.abs(rc / row), np.inf)
            theta_min = float(theta.min())
            # Among ratio ties (ubiquitous on degenerate optimal faces) take
            # the largest pivot: smallest primal movement and best stability,
            # so warm-started re-solves stay on the incumbent vertex.
            tied = theta <= theta_min + 1e-12
            score = np.where(tied & elig, np.abs(row), -1.0)
            q = int(np.argmax(score))
            alpha = self.Binv @ self.M[:, q]
            if self.state[q] == _AT_UPPER:
                dirn = -1.0
            elif self.state[q] == _AT_LOWER:
                dirn = 1.0
            else:
                dirn = 1.0 if (row[q] > 0) == leave_at_upper else -1.0
            target = ub_b[r] if leave_at_upper else lb_b[r]
            t = (self.x_b[r] - target) / (dirn * alpha[r])
            t = max(t, 0.0)
            rng = self.ub[q] - self.lb[q]
            if np.isfinite(rng) and t > rng + 1e-12:
                # Dual bound flip: entering variable exhausts its range before
                # the leaving variable reaches its bound.
                self.x_b -= rng * dirn * alpha
                self.state[q] = _AT_UPPER if dirn > 0 else _AT_LOWER
                self.pivots += 1
                stalled += 1
                continue
            stalled = stalled + 1 if t <= 1e-11 else 0
            old_state = self.state[q]
            start_val = (self.lb[q] if old_state == _AT_LOWER
                         else self.ub[q] if old_state == _AT_UPPER else 0.0)
            self.x_b -= t * dirn * alpha
            self.state[self.basis[r]] = _AT_UPPER if leave_at_upper else _AT_LOWER
            self.state[q] = _BASIC
            self.basis[r] = q
            self.x_b[r] = start_val + dirn * t
            self._eta_update(alpha, r)
            gamma = rc[q] / row[q]
            rc = rc - gamma * row
            rc[q] = 0.0

    # -- phase handling -------------------------------------------------------

    def cold_start(self):
        """Install the crash basis: slacks where feasible, artificials elsewhere."""
        for j in range(self.nt):
            self.state[j] = self._default_state(j)
        vals = self._nonbasic_values()
        vals[self.nt:] = 0.0
        resid = self.d - self.M[:, :self.nt] @ vals[:self.nt]
        sig = np.where(resid < 0, -1.0, 1.0)
        self.M[:, self.nt:] = np.diag(sig)
        self._colscale[self.nt:] = 1.0
        for i in range(self.m):
            # Inequality rows with nonnegative residual seat their slack;
            # everything else gets an artificial opened for phase 1.
            if i >= self.me and resid[i] >= 0:
                sj = self.n + (i - self.me)
                self.basis[i] = sj
                self.state[sj] = _BASIC
                self.x_b[i] = resid[i]
            else:
                aj = self.nt + i
                self.basis[i] = aj
                self.state[aj] = _BASIC
                self.x_b[i] = abs(resid[i])
                self.ub[aj] = np.inf
        self.Binv = np.linalg.inv(self.M[:, self.basis])

    def phase1(self):
        cost1 = np.zeros(self.ncol)
        cost1[self.nt:] = 1.0
        status = self._primal_loop(cost1)
        if status is LpStatus.UNBOUNDED:  # pragma: no cover - cannot happen
            raise RuntimeError("phase-1 objective is bounded below by zero")
        if status is not LpStatus.OPTIMAL:
            return status
        art_sum = float(cost1 @ self._point())
        if art_sum > 10.0 * self.feas_scale * max(1.0, np.sqrt(self.m)):
            return LpStatus.INFEASIBLE
        self.ub[self.nt:] = 0.0
        self._purge_artificials()
        return LpStatus.OPTIMAL

    def _purge_artificials(self):
        """Pivot basic artificials out on zero-length steps where possible."""
        self._has_artificial_in_basis = False
        for r in range(self.m):
            if self.basis[r] < self.nt:
                continue
            row = self.Binv[r] @ self.M[:, :self.nt]
            cand = np.nonzero((np.abs(row) > 1e-8) & (self.state[:self.nt] != _BASIC))[0]
            if cand.size == 0:
                self._has_artificial_in_basis = True
                continue
            q = int(cand[np.argmax(np.abs(row[cand]))])
            alpha = self.Binv @ self.M[:, q]
            old_state = self.state[q]
            start_val = (self.lb[q] if old_state == _AT_LOWER
                         else self.ub[q] if old_state == _AT_UPPER else 0.0)
            art = self.basis[r]
            self.state[art] = _AT_LOWER
            self.state[q] = _BASIC
            self.basis[r] = q
            self.x_b[r] = start_val
            self._eta_update(alpha, r)

    def warm_start(self, basis: LpBasis):
        """Install a caller-supplied basis. Returns False if unusable."""
        if basis.basic.shape != (self.m,) or basis.nonbasic_state.shape != (self.nt,):
            raise LpInputError("warm-start basis does not match problem dimensions")
        basic = np.asarray(basis.basic, dtype=int)
        if np.any(basic < 0) or np.any(basic >= self.nt) or np.unique(basic).size != self.m:
            return False
        self.M[:, self.nt:] = 0.0
        self.ub[self.nt:] = 0.0
        self.basis = basic.copy()
        st = np.asarray(basis.nonbasic_state, dtype=np.int8).copy()
        for j in range(self.nt):
            if st[j] == _AT_LOWER and not np.isfinite(self.lb[j]):
                st[j] = self._default_state(j)
            elif st[j] == _AT_UPPER and not np.isfinite(self.ub[j]):
                st[j] = self._default_state(j)
        st[basic] = _BASIC
        self.state[:self.nt] = st
        self.state[self.nt:] = _AT_LOWER
        try:
            self._refactorize()
        except RuntimeError:
            return False
        return True

    def dual_feasible(self, cost):
        y, rc = self._price(cost)
        tols = self._dual_tols(cost, y)
        return not np.any(self._violations(rc, 10.0 * tols) > 0)

    def flip_to_dual_feasible(self, cost):
        """Dual phase 1 by bound flipping: move nonbasic variables with a
        wrong-sign reduced cost to their opposite (finite) bound. Returns
        False when a one-sided or free variable blocks dual feasibility."""
        y, rc = self._price(cost)
        tols = 10.0 * self._dual_tols(cost, y)
        movable = (self.ub - self.lb) > 0
        bad_lo = (self.state == _AT_LOWER) & movable & (rc < -tols)
        bad_up = (self.state == _AT_UPPER) & movable & (rc > tols)
        bad_free = (self.state == _FREE) & (np.abs(rc) > tols)
        if np.any(bad_free) or np.any(bad_lo & ~np.isfinite(self.ub)) \
                or np.any(bad_up & ~np.isfinite(self.lb)):
            return False
        if not (np.any(bad_lo) or np.any(bad_up)):
            return True
        self.state[bad_lo] = _AT_UPPER
        self.state[bad_up] = _AT_LOWER
        vals = self._nonbasic_values()
        vals[self.basis] = 0.0
        self.x_b = self.Binv @ (self.d - self.M @ vals)
        return True

    def primal_feasible(self):
        lb_b = self.lb[self.basis]
        ub_b = self.ub[self.basis]
        below = np.where(np.isfinite(lb_b), lb_b - self.x_b, -np.inf)
        above = np.where(np.isfinite(ub_b), self.x_b - ub_b, -np.inf)
        if self.m == 0:
            return True
        return float(np.maximum(below, above).max()) <= self.feas_scale

    # -- solution extraction --------------------------------------------------

    def extract(self, status, rule):
        p = self.p
        if self.m:
            self._refactorize()
        point = self._point()
        w = point[:self.n].copy()
        y, rc = self._price(self.cost2)
        lam = -y[:self.me].copy()
        pi = -y[self.me:].copy()
        objective = float(p.cost @ w) if status is not LpStatus.INFEASIBLE else float("nan")
        reusable = not self._has_artificial_in_basis and np.all(self.basis < self.nt)
        basis = None
        if reusable:
            basis = LpBasis(basic=self.basis.copy(),
                            nonbasic_state=self.state[:self.nt].copy())
        return LpSolution(
            status=status,
            primal=w,
            duals_eq=lam,
            duals_ineq=pi,
            objective=objective,
            reduced_costs=rc[:self.n].copy(),
            basis=basis,
            pivots=self.pivots,
            pivot_rule=rule,
        )


def solve_lp(problem: LpProblem, tol: Optional[ToleranceSet] = None,
             start_basis: Optional[LpBasis] = None) -> LpSolution:
    """Solve an LP, optionally warm-starting from a previous basis.

    Returns a vertex solution with equality and inequality duals. Warm starts
    that turn out unusable (singular or dual-infeasible basis) silently fall
    back to the cold two-phase path; the route taken is recorded in
    ``pivot_rule``.
    """
    tol = tol or ToleranceSet()
    core = _Simplex(problem, tol)
    rule = "cold:primal"
    if start_basis is not None:
        warm = _Simplex(problem, tol)
        if warm.warm_start(start_basis):
            if warm.dual_feasible(warm.cost2) or warm.flip_to_dual_feasible(warm.cost2):
                status = warm._dual_loop(warm.cost2)
                if status is LpStatus.OPTIMAL:
                    status = warm._primal_loop(warm.cost2)
                    status = _polish(warm, status)
                    return warm.extract(status, "warm:dual+primal")
                if status is LpStatus.INFEASIBLE:
                    return warm.extract(status, "warm:dual")
                # budget exhausted on the warm path: fall through to cold
            elif warm.primal_feasible():
                status = warm._primal_loop(warm.cost2)
                status = _polish(warm, status)
                return warm.extract(status, "warm:primal")
        rule = "warm-fallback-cold:primal"
    core.cold_start()
    status = core.phase1()
    if status is not LpStatus.OPTIMAL:
        return core.extract(status, rule + "(phase1)")
    status = core._primal_loop(core.cost2)
    status = _polish(core, status)
    if core._use_bland:
        rule += "(bland)"
    return core.extract(status, rule)


def _polish(core: _Simplex, status: LpStatus) -> LpStatus:
    """Refactorize and re-run pricing once so the reported point is crisp."""
    if status is not LpStatus.OPTIMAL or core.m == 0:
        return status
    core._refactorize()
    return core._primal_loop(core.cost2)


def lp_kkt_residual(problem: LpProblem, solution: LpSolution) -> float:
    """Max-norm KKT residual of a solution, recomputed from problem data only.

    Covers primal feasibility (equalities, inequalities, bounds), dual
    feasibility, complementarity, and stationarity with bound multipliers
    recovered from the reduced costs.
    """
    p, s = problem, solution
    w = s.primal
    res = 0.0
    if p.n_eq:
        res = max(res, float(np.abs(p.eq_matrix @ w + p.eq_rhs).max()))
    act = p.ineq_matrix @ w + p.ineq_rhs if p.n_ineq else np.zeros(0)
    if p.n_ineq:
        res = max(res, float(np.maximum(act, 0.0).max()))
        res = max(res, float(np.maximum(-s.duals_ineq, 0.0).max()))
        res = max(res, float(np.abs(s.duals_ineq * act).max()))
    lo_v = np.where(np.isfinite(p.lower), p.lower - w, -np.inf)
    up_v = np.where(np.isfinite(p.upper), w - p.upper, -np.inf)
    res = max(res, float(np.maximum(np.maximum(lo_v, up_v), 0.0).max()) if w.size else 0.0)
    rc = p.cost.copy()
    if p.n_eq:
        rc += p.eq_matrix.T @ s.duals_eq
    if p.n_ineq:
        rc += p.ineq_matrix.T @ s.duals_ineq
    bnd_tol = 1e-9 * (1.0 + np.abs(w))
    at_lower = np.isfinite(p.lower) & (np.abs(w - p.lower) <= bnd_tol)
    at_upper = np.isfinite(p.upper) & (np.abs(w - p.upper) <= bnd_tol)
    for j in range(w.size):
        if at_lower[j] and at_upper[j]:
            continue  # fixed variable: any reduced cost is supportable
        if at_lower[j]:
            res = max(res, max(0.0, -rc[j]))
        elif at_upper[j]:
            res = max(res, max(0.0, rc[j]))
        else:
            res = max(res, abs(rc[j]))
    return res

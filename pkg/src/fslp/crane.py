"""Time-optimal overhead-crane motion problem as a canonical NLP.

Multiple-shooting transcription: states at the shooting nodes, piecewise
constant controls, the horizon length as a decision variable entering the
integrator step size, per-stage separating-hyperplane variables certifying
payload/obstacle clearance, relaxed start/end conditions with penalized
slacks, and nonnegative reformulation slacks turning the (nonlinear)
payload-side hyperplane inequalities into equalities.

State order (x_c, x_c_dot, l, l_dot, theta, theta_dot); controls are the cart
acceleration and the hoist winding acceleration. The payload sits at
(x_c + l*sin(theta), -l*cos(theta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .lp import LpProblem, LpStatus, solve_lp
from .nlp import EvaluationError, NlpProblem, VariablePartition, infeasibility

STATE_NAMES = ("x_c", "x_c_dot", "l", "l_dot", "theta", "theta_dot")
N_STATES = 6
N_CONTROLS = 2


class InitializationError(RuntimeError):
    """The forward-simulated trajectory admits no valid starting point."""


@dataclass(frozen=True)
class CraneBounds:
    """Box bounds on states, controls, horizon, and hyperplane variables."""

    state_lower: tuple = (-0.1, -0.4, 1e-2, -0.25, -0.75, -math.inf)
    state_upper: tuple = (0.6, 0.4, 2.0, 0.25, 0.75, math.inf)
    control_lower: tuple = (-5.0, -5.0)
    control_upper: tuple = (5.0, 5.0)
    t_lower: float = 0.1
    t_upper: float = 10.0
    hyperplane_box: float = 1.0

    def __post_init__(self):
        sl = np.asarray(self.state_lower, dtype=float)
        su = np.asarray(self.state_upper, dtype=float)
        cl = np.asarray(self.control_lower, dtype=float)
        cu = np.asarray(self.control_upper, dtype=float)
        if sl.size != N_STATES or su.size != N_STATES:
            raise ValueError("state bounds must have six entries")
        if cl.size != N_CONTROLS or cu.size != N_CONTROLS:
            raise ValueError("control bounds must have two entries")
        if np.any(sl >= su) or np.any(cl >= cu) or not self.t_lower < self.t_upper:
            raise ValueError("lower bounds must be strictly below upper bounds")
        if self.hyperplane_box <= 0:
            raise ValueError("hyperplane box must be positive")


@dataclass(frozen=True)
class CraneConfig:
    """Physical parameters, bounds, obstacle, horizon, and endpoints."""

    n_intervals: int = 20
    rk4_substeps: int = 20
    gravity: float = 9.81
    r_load: float = 0.08
    start_payload: tuple = (0.0, -0.6)
    end_payload: tuple = (0.5, -0.6)
    obstacle_vertices: tuple = ((0.2, -0.55), (0.3, -0.55), (0.3, -0.35), (0.2, -0.35))
    bounds: CraneBounds = field(default_factory=CraneBounds)
    slack_penalty: float = 1e5
    T_init: float = 2.5
    u_init: tuple = (0.0, 0.1)

    def __post_init__(self):
        if self.n_intervals < 1 or self.rk4_substeps < 1:
            raise ValueError("n_intervals and rk4_substeps must be positive")
        if self.slack_penalty <= 0:
            raise ValueError("slack_penalty must be positive")
        if self.r_load < 0:
            raise ValueError("r_load must be nonnegative")
        verts = np.asarray(self.obstacle_vertices, dtype=float)
        if verts.shape != (4, 2):
            raise ValueError("obstacle_vertices must be four planar points")
        centered = verts - verts.mean(axis=0)
        if np.linalg.matrix_rank(centered, tol=1e-12) < 2:
            raise ValueError("obstacle vertices are degenerate (collinear)")

    @property
    def obstacle(self) -> np.ndarray:
        return np.asarray(self.obstacle_vertices, dtype=float)


@dataclass
class CraneState:
    x_c: float
    x_c_dot: float
    l: float
    l_dot: float
    theta: float
    theta_dot: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x_c, self.x_c_dot, self.l, self.l_dot,
                         self.theta, self.theta_dot])

    @classmethod
    def from_array(cls, arr) -> "CraneState":
        arr = np.asarray(arr, dtype=float)
        return cls(*arr.tolist())


def crane_dynamics(state, control, gravity: float = 9.81) -> np.ndarray:
    """State derivative of the crane; the hoist length must stay positive."""
    x = state.as_array() if isinstance(state, CraneState) else np.asarray(state, dtype=float)
    u = np.asarray(control, dtype=float)
    if x[2] <= 0.0:
        raise EvaluationError("hoist length must be positive to evaluate the dynamics")
    theta, theta_dot = x[4], x[5]
    theta_ddot = (math.cos(theta) * u[0] - 2.0 * x[3] * theta_dot
                  - gravity * math.sin(theta)) / x[2]
    return np.array([x[1], u[0], x[3], u[1], theta_dot, theta_ddot])


def rk4_step(dynamics, x, u, h_total: float, substeps: int) -> np.ndarray:
    """Classical fourth-order step over h_total split into equal substeps,
    with the input held constant."""
    if h_total <= 0.0 or substeps < 1:
        raise ValueError("need h_total > 0 and at least one substep")
    x = np.asarray(x, dtype=float).copy()
    tau = h_total / substeps
    for _ in range(substeps):
        k1 = np.asarray(dynamics(x, u), dtype=float)
        k2 = np.asarray(dynamics(x + 0.5 * tau * k1, u), dtype=float)
        k3 = np.asarray(dynamics(x + 0.5 * tau * k2, u), dtype=float)
        k4 = np.asarray(dynamics(x + tau * k3, u), dtype=float)
        x = x + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x


# -- batched dynamics and sensitivities --------------------------------------

def _dyn_batch(X, U, gravity):
    l = X[:, 2]
    if np.any(l <= 0.0):
        raise EvaluationError("hoist length must be positive to evaluate the dynamics")
    th = X[:, 4]
    out = np.empty_like(X)
    out[:, 0] = X[:, 1]
    out[:, 1] = U[:, 0]
    out[:, 2] = X[:, 3]
    out[:, 3] = U[:, 1]
    out[:, 4] = X[:, 5]
    out[:, 5] = (np.cos(th) * U[:, 0] - 2.0 * X[:, 3] * X[:, 5]
                 - gravity * np.sin(th)) / l
    return out


def _dyn_jac_batch(X, U, gravity):
    K = X.shape[0]
    l = X[:, 2]
    vl = X[:, 3]
    th = X[:, 4]
    om = X[:, 5]
    tdd = (np.cos(th) * U[:, 0] - 2.0 * vl * om - gravity * np.sin(th)) / l
    A = np.zeros((K, 6, 6))
    A[:, 0, 1] = 1.0
    A[:, 2, 3] = 1.0
    A[:, 4, 5] = 1.0
    A[:, 5, 2] = -tdd / l
    A[:, 5, 3] = -2.0 * om / l
    A[:, 5, 4] = (-np.sin(th) * U[:, 0] - gravity * np.cos(th)) / l
    A[:, 5, 5] = -2.0 * vl / l
    B = np.zeros((K, 6, 2))
    B[:, 1, 0] = 1.0
    B[:, 3, 1] = 1.0
    B[:, 5, 0] = np.cos(th) / l
    return A, B


def _rk4_batch(X0, U, h_total, substeps, gravity):
    X = np.array(X0, dtype=float)
    tau = h_total / substeps
    for _ in range(substeps):
        k1 = _dyn_batch(X, U, gravity)
        k2 = _dyn_batch(X + 0.5 * tau * k1, U, gravity)
        k3 = _dyn_batch(X + 0.5 * tau * k2, U, gravity)
        k4 = _dyn_batch(X + tau * k3, U, gravity)
        X = X + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return X


def _rk4_batch_sens(X0, U, h_total, substeps, gravity):
    """End states plus sensitivities w.r.t. the initial state, the control,
    and the total interval length (the step size is h_total/substeps, so the
    length sensitivity accumulates a dtau/dh term per substep)."""
    K = X0.shape[0]
    X = np.array(X0, dtype=float)
    Sx = np.tile(np.eye(6), (K, 1, 1))
    Su = np.zeros((K, 6, 2))
    Sh = np.zeros((K, 6))
    tau = h_total / substeps
    dtau = 1.0 / substeps
    for _ in range(substeps):
        k1 = _dyn_batch(X, U, gravity)
        A1, B1 = _dyn_jac_batch(X, U, gravity)
        K1x = A1 @ Sx
        K1u = A1 @ Su + B1
        K1h = np.einsum("kij,kj->ki", A1, Sh)

        X2 = X + 0.5 * tau * k1
        S2x = Sx + 0.5 * tau * K1x
        S2u = Su + 0.5 * tau * K1u
        S2h = Sh + 0.5 * tau * K1h + 0.5 * dtau * k1
        k2 = _dyn_batch(X2, U, gravity)
        A2, B2 = _dyn_jac_batch(X2, U, gravity)
        K2x = A2 @ S2x
        K2u = A2 @ S2u + B2
        K2h = np.einsum("kij,kj->ki", A2, S2h)

        X3 = X + 0.5 * tau * k2
        S3x = Sx + 0.5 * tau * K2x
        S3u = Su + 0.5 * tau * K2u
        S3h = Sh + 0.5 * tau * K2h + 0.5 * dtau * k2
        k3 = _dyn_batch(X3, U, gravity)
        A3, B3 = _dyn_jac_batch(X3, U, gravity)
        K3x = A3 @ S3x
        K3u = A3 @ S3u + B3
        K3h = np.einsum("kij,kj->ki", A3, S3h)

        X4 = X + tau * k3
        S4x = Sx + tau * K3x
        S4u = Su + tau * K3u
        S4h = Sh + tau * K3h + dtau * k3
        k4 = _dyn_batch(X4, U, gravity)
        A4, B4 = _dyn_jac_batch(X4, U, gravity)
        K4x = A4 @ S4x
        K4u = A4 @ S4u + B4
        K4h = np.einsum("kij,kj->ki", A4, S4h)

        ksum = k1 + 2.0 * k2 + 2.0 * k3 + k4
        X = X + (tau / 6.0) * ksum
        Sx = Sx + (tau / 6.0) * (K1x + 2.0 * K2x + 2.0 * K3x + K4x)
        Su = Su + (tau / 6.0) * (K1u + 2.0 * K2u + 2.0 * K3u + K4u)
        Sh = Sh + (tau / 6.0) * (K1h + 2.0 * K2h + 2.0 * K3h + K4h) + (dtau / 6.0) * ksum
    return X, Sx, Su, Sh


def simulate(cfg: CraneConfig, x0, controls, horizon: float) -> np.ndarray:
    """Forward simulation over the shooting grid; returns all node states."""
    N = cfg.n_intervals
    controls = np.asarray(controls, dtype=float).reshape(N, 2)
    states = np.zeros((N + 1, 6))
    states[0] = np.asarray(x0, dtype=float)
    h = horizon / N
    for k in range(N):
        states[k + 1] = _rk4_batch(states[k:k + 1], controls[k:k + 1], h,
                                   cfg.rk4_substeps, cfg.gravity)[0]
    return states


def payload_position(states) -> np.ndarray:
    """Payload coordinates for one state or a stack of states."""
    arr = np.asarray(states, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    p = np.stack([arr[:, 0] + arr[:, 2] * np.sin(arr[:, 4]),
                  -arr[:, 2] * np.cos(arr[:, 4])], axis=1)
    return p[0] if single else p


def rest_state(payload) -> np.ndarray:
    """State hanging at rest over a payload point (requires payload below the rail)."""
    px, py = float(payload[0]), float(payload[1])
    if py >= 0.0:
        raise InitializationError("payload must hang below the rail (negative y)")
    return np.array([px, 0.0, -py, 0.0, 0.0, 0.0])


# -- variable layout ----------------------------------------------------------

@dataclass(frozen=True)
class TocpLayout:
    """Index bookkeeping of the stacked decision vector.

    Order: node states, stage controls, hyperplane normals (stages 1..N),
    hyperplane offsets, horizon, start slacks, end slacks, obstacle slacks.
    """

    n_intervals: int

    def __post_init__(self):
        N = self.n_intervals
        pos = 0

        def take(shape):
            nonlocal pos
            size = int(np.prod(shape))
            idx = np.arange(pos, pos + size).reshape(shape)
            idx.flags.writeable = False
            pos += size
            return idx

        object.__setattr__(self, "state_idx", take((N + 1, 6)))
        object.__setattr__(self, "control_idx", take((N, 2)))
        object.__setattr__(self, "hyper_h_idx", take((N, 2)))
        object.__setattr__(self, "hyper_c_idx", take((N,)))
        object.__setattr__(self, "t_idx", int(take((1,))[0]))
        n_y = pos
        object.__setattr__(self, "s0_idx", take((6,)))
        object.__setattr__(self, "sN_idx", take((6,)))
        object.__setattr__(self, "s_nlp_idx", take((N,)))
        object.__setattr__(self, "n_w", pos)
        object.__setattr__(self, "n_y", n_y)

    def partition(self) -> VariablePartition:
        return VariablePartition(
            n_w=self.n_w,
            y_indices=np.arange(self.n_y),
            s_ocp_indices=np.concatenate([self.s0_idx, self.sN_idx]),
            s_nlp_indices=self.s_nlp_idx.copy(),
        )

    def states(self, w) -> np.ndarray:
        return np.asarray(w, dtype=float)[self.state_idx]

    def controls(self, w) -> np.ndarray:
        return np.asarray(w, dtype=float)[self.control_idx]

    def horizon(self, w) -> float:
        return float(np.asarray(w, dtype=float)[self.t_idx])

    def endpoint_slacks(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return np.concatenate([w[self.s0_idx], w[self.sN_idx]])

    def hyperplanes(self, w):
        w = np.asarray(w, dtype=float)
        return w[self.hyper_h_idx], w[self.hyper_c_idx]


def endpoint_slack_norm(w, layout: TocpLayout) -> float:
    return float(np.abs(layout.endpoint_slacks(w)).max())


def is_zero_slack_feasible(p: NlpProblem, w, layout: TocpLayout,
                           h_tol: float = 1e-7, s_tol: float = 1e-6) -> bool:
    """Feasible and with start/end relaxation slacks at zero (within s_tol)."""
    return (infeasibility(p, w) <= h_tol
            and endpoint_slack_norm(w, layout) <= s_tol)


# -- transcription ------------------------------------------------------------

def build_tocp(cfg: CraneConfig):
    """Assemble the canonical NLP and its layout for a configuration.

    Nonlinear equalities: shooting gaps (states minus the integrated
    predecessor) and the payload-side hyperplane rows closed by nonnegative
    obstacle slacks. Linear inequalities: endpoint relaxations, obstacle
    vertex separation, and every box row.
    """
    N = cfg.n_intervals
    layout = TocpLayout(n_intervals=N)
    part = layout.partition()
    n_w = layout.n_w
    n_g = 6 * N + N
    bounds = cfg.bounds
    verts = cfg.obstacle
    xbar0 = rest_state(cfg.start_payload)
    xbarN = rest_state(cfg.end_payload)

    cost = np.zeros(n_w)
    cost[layout.t_idx] = 1.0
    cost[layout.s0_idx] = cfg.slack_penalty
    cost[layout.sN_idx] = cfg.slack_penalty

    C = np.zeros((n_g, n_w))
    for k in range(N):
        C[6 * k:6 * k + 6, layout.state_idx[k + 1]] = np.eye(6)
    for k in range(N):
        row = 6 * N + k
        C[row, layout.hyper_c_idx[k]] = -1.0
        C[row, layout.s_nlp_idx[k]] = 1.0

    rows = []
    rhs = []

    def add_row(coeffs, b):
        r = np.zeros(n_w)
        for j, v in coeffs:
            r[j] = v
        rows.append(r)
        rhs.append(b)

    # endpoint relaxations: -s <= x - xbar <= s
    for i in range(6):
        add_row([(layout.state_idx[0, i], 1.0), (layout.s0_idx[i], -1.0)], -xbar0[i])
    for i in range(6):
        add_row([(layout.state_idx[0, i], -1.0), (layout.s0_idx[i], -1.0)], xbar0[i])
    for i in range(6):
        add_row([(layout.state_idx[N, i], 1.0), (layout.sN_idx[i], -1.0)], -xbarN[i])
    for i in range(6):
        add_row([(layout.state_idx[N, i], -1.0), (layout.sN_idx[i], -1.0)], xbarN[i])

    # vertex separation: v_i . u_h >= u_c, stages 1..N
    for k in range(N):
        for v in verts:
            add_row([(layout.hyper_h_idx[k, 0], -v[0]),
                     (layout.hyper_h_idx[k, 1], -v[1]),
                     (layout.hyper_c_idx[k], 1.0)], 0.0)

    def add_box(j, lo, up):
        if np.isfinite(up):
            add_row([(j, 1.0)], -up)
        if np.isfinite(lo):
            add_row([(j, -1.0)], lo)

    for k in range(N + 1):
        for i in range(6):
            add_box(layout.state_idx[k, i], bounds.state_lower[i], bounds.state_upper[i])
    for k in range(N):
        for i in range(2):
            add_box(layout.control_idx[k, i], bounds.control_lower[i], bounds.control_upper[i])
    hb = bounds.hyperplane_box
    for k in range(N):
        add_box(layout.hyper_h_idx[k, 0], -hb, hb)
        add_box(layout.hyper_h_idx[k, 1], -hb, hb)
    for k in range(N):
        add_box(layout.hyper_c_idx[k], -hb, hb)
    add_box(layout.t_idx, bounds.t_lower, bounds.t_upper)
    for j in layout.s0_idx:
        add_box(j, 0.0, np.inf)
    for j in layout.sN_idx:
        add_box(j, 0.0, np.inf)
    for j in layout.s_nlp_idx:
        add_box(j, 0.0, np.inf)

    A = np.vstack(rows)
    b = np.asarray(rhs, dtype=float)

    N_ = N
    M_ = cfg.rk4_substeps
    grav = cfg.gravity
    r_load = cfg.r_load
    st_idx = layout.state_idx
    u_idx = layout.control_idx
    uh_idx = layout.hyper_h_idx
    t_pos = layout.t_idx

    def unpack(y):
        y = np.asarray(y, dtype=float)
        states = y[st_idx.ravel()].reshape(N_ + 1, 6)
        controls = y[u_idx.ravel()].reshape(N_, 2)
        uh = y[uh_idx.ravel()].reshape(N_, 2)
        horizon = y[t_pos]
        return states, controls, uh, horizon

    def g(y):
        states, controls, uh, horizon = unpack(y)
        pred = _rk4_batch(states[:-1], controls, horizon / N_, M_, grav)
        out = np.empty(n_g)
        out[:6 * N_] = (-pred).ravel()
        pk = payload_position(states[1:])
        out[6 * N_:] = np.einsum("ki,ki->k", pk, uh) + r_load
        return out

    def g_jacobian(y):
        states, controls, uh, horizon = unpack(y)
        _, Sx, Su, Sh = _rk4_batch_sens(states[:-1], controls, horizon / N_, M_, grav)
        jac = np.zeros((n_g, layout.n_y))
        for k in range(N_):
            r = slice(6 * k, 6 * k + 6)
            jac[r, st_idx[k, 0]:st_idx[k, 5] + 1] = -Sx[k]
            jac[r, u_idx[k, 0]:u_idx[k, 1] + 1] = -Su[k]
            jac[r, t_pos] = -Sh[k] / N_
        l = states[1:, 2]
        th = states[1:, 4]
        pk = payload_position(states[1:])
        for k in range(N_):
            r = 6 * N_ + k
            jac[r, st_idx[k + 1, 0]] = uh[k, 0]
            jac[r, st_idx[k + 1, 2]] = uh[k, 0] * np.sin(th[k]) - uh[k, 1] * np.cos(th[k])
            jac[r, st_idx[k + 1, 4]] = (uh[k, 0] * l[k] * np.cos(th[k])
                                        + uh[k, 1] * l[k] * np.sin(th[k]))
            jac[r, uh_idx[k, 0]] = pk[k, 0]
            jac[r, uh_idx[k, 1]] = pk[k, 1]
        return jac.T

    problem = NlpProblem(cost=cost, eq_linear=C, ineq_matrix=A, ineq_rhs=b,
                         g=g, g_jacobian=g_jacobian, partition=part,
                         check_ineq_rank=False)
    return problem, layout


# -- feasible initialization ---------------------------------------------------

def _best_separator(point, verts, r_load, box):
    """Hyperplane (normal, offset) with maximal margin separating a point from
    the polygon vertices, over the normalization box. Margin may be negative
    when the point is too close."""
    rows = [np.array([point[0], point[1], -1.0, 1.0])]
    rhs = [r_load]
    for v in verts:
        rows.append(np.array([-v[0], -v[1], 1.0, 0.0]))
        rhs.append(0.0)
    lp = LpProblem(
        cost=np.array([0.0, 0.0, 0.0, -1.0]),
        eq_matrix=np.zeros((0, 4)), eq_rhs=np.zeros(0),
        ineq_matrix=np.vstack(rows), ineq_rhs=np.asarray(rhs),
        lower=np.array([-box, -box, -box, -np.inf]),
        upper=np.array([box, box, box, np.inf]),
    )
    sol = solve_lp(lp)
    if sol.status is not LpStatus.OPTIMAL:
        raise InitializationError(f"separator subproblem returned {sol.status.value}")
    uh = sol.primal[:2]
    uc = sol.primal[2]
    margin = sol.primal[3]
    return uh, uc, margin


def feasible_initialization(cfg: CraneConfig, layout: Optional[TocpLayout] = None) -> np.ndarray:
    """Starting point from forward simulation with constant controls.

    States come from simulating the dynamics over the initial horizon;
    endpoint slacks take the componentwise residual magnitude (the cheapest
    value for a two-sided relaxation); hyperplane variables maximize the
    separation margin per stage; obstacle slacks are pinned by their
    equalities. The result is feasible by construction.
    """
    layout = layout or TocpLayout(n_intervals=cfg.n_intervals)
    N = cfg.n_intervals
    x0 = rest_state(cfg.start_payload)
    xbarN = rest_state(cfg.end_payload)
    controls = np.tile(np.asarray(cfg.u_init, dtype=float), (N, 1))
    states = simulate(cfg, x0, controls, cfg.T_init)

    w = np.zeros(layout.n_w)
    w[layout.state_idx.ravel()] = states.ravel()
    w[layout.control_idx.ravel()] = controls.ravel()
    w[layout.t_idx] = cfg.T_init
    w[layout.s0_idx] = np.abs(states[0] - x0)
    w[layout.sN_idx] = np.abs(states[N] - xbarN)

    verts = cfg.obstacle
    pk = payload_position(states[1:])
    for k in range(N):
        uh, uc, margin = _best_separator(pk[k], verts, cfg.r_load,
                                         cfg.bounds.hyperplane_box)
        if margin < 0.0:
            raise InitializationError(
                f"simulated trajectory comes within the load radius of the "
                f"obstacle at stage {k + 1} (margin {margin:.3e})")
        w[layout.hyper_h_idx[k]] = uh
        w[layout.hyper_c_idx[k]] = uc
        w[layout.s_nlp_idx[k]] = -(pk[k] @ uh - uc + cfg.r_load)
    return w


# -- perturbed instance generation ---------------------------------------------

def _polygon_distance(point, verts) -> float:
    """Distance from a point to a convex polygon given by unordered vertices."""
    verts = np.asarray(verts, dtype=float)
    center = verts.mean(axis=0)
    order = np.argsort(np.arctan2(verts[:, 1] - center[1], verts[:, 0] - center[0]))
    poly = verts[order]
    p = np.asarray(point, dtype=float)
    inside = True
    dmin = np.inf
    n = len(poly)
    for i in range(n):
        a = poly[i]
        bpt = poly[(i + 1) % n]
        edge = bpt - a
        cross = edge[0] * (p[1] - a[1]) - edge[1] * (p[0] - a[0])
        if cross < 0:
            inside = False
        t = np.clip(np.dot(p - a, edge) / max(np.dot(edge, edge), 1e-300), 0.0, 1.0)
        dmin = min(dmin, float(np.linalg.norm(p - (a + t * edge))))
    return 0.0 if inside else dmin


def _valid_endpoint(point, cfg: CraneConfig) -> bool:
    if _polygon_distance(point, cfg.obstacle) <= cfg.r_load:
        return False
    try:
        state = rest_state(point)
    except InitializationError:
        return False
    sl = np.asarray(cfg.bounds.state_lower)
    su = np.asarray(cfg.bounds.state_upper)
    return bool(np.all(state >= sl) and np.all(state <= su))


def perturb_problems(cfg: CraneConfig, seed: int, count: int,
                     radius: float = 0.05):
    """Deterministic grid of perturbed start/end configurations.

    ``count`` must be a perfect square: sqrt(count) start perturbations are
    crossed with sqrt(count) end perturbations. Offsets are uniform over an
    axis-aligned box of the given half-width; draws landing inside the
    obstacle (or outside the state box) are redrawn from the same stream.
    """
    side = math.isqrt(count)
    if side * side != count:
        raise ValueError("count must be a perfect square")
    rng = np.random.default_rng(seed)

    def draw(base):
        while True:
            point = np.asarray(base, dtype=float) + rng.uniform(-radius, radius, size=2)
            if radius == 0.0 or _valid_endpoint(point, cfg):
                return tuple(point.tolist())

    starts = [draw(cfg.start_payload) for _ in range(side)]
    ends = [draw(cfg.end_payload) for _ in range(side)]
    return [replace(cfg, start_payload=s, end_payload=e)
            for s in starts for e in ends]

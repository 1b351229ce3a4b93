"""Two-variable parametric test problem with one curved constraint.

    minimize  w2   subject to   w2 >= w1**2,   w2 >= 0.1*w1 + eps

The curved inequality is reformulated as the equality w1**2 - w2 + s = 0 with
a nonnegative reformulation slack s, giving the canonical structure with
w = (w1, w2, s). For eps = 0.06 the optimum (-0.2, 0.04) sits in a vertex of
the linearized constraints (fully determined); for eps = -0.06 the optimum
(0, 0) does not.
"""

from __future__ import annotations

import numpy as np

from .nlp import NlpProblem, VariablePartition


def known_optimum(eps: float):
    """Optimal (w1, w2) for the two calibrated parameter values, else None."""
    if eps == 0.06:
        return np.array([-0.2, 0.04])
    if eps == -0.06:
        return np.array([0.0, 0.0])
    return None


def build_illustrative(eps: float) -> NlpProblem:
    if not np.isfinite(eps):
        raise ValueError("eps must be finite")

    def g(y):
        return np.array([y[0] ** 2])

    def g_jacobian(y):
        return np.array([[2.0 * y[0]], [0.0]])  # (n_y=2, n_g=1)

    partition = VariablePartition(
        n_w=3,
        y_indices=np.array([0, 1]),
        s_ocp_indices=np.array([], dtype=int),
        s_nlp_indices=np.array([2]),
    )
    return NlpProblem(
        cost=np.array([0.0, 1.0, 0.0]),
        eq_linear=np.array([[0.0, -1.0, 1.0]]),
        ineq_matrix=np.array([[0.1, -1.0, 0.0],
                              [0.0, 0.0, -1.0]]),
        ineq_rhs=np.array([eps, 0.0]),
        g=g,
        g_jacobian=g_jacobian,
        partition=partition,
    )

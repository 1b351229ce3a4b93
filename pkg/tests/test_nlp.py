"""Tests for the canonical problem representation and its evaluation helpers."""

import numpy as np
import pytest

from fslp.illustrative import build_illustrative
from fslp.nlp import (EvaluationError, InfeasibleSlackError, NlpProblem,
                      VariablePartition, assemble_w, infeasibility,
                      kkt_residual, linearize, minimal_slack,
                      validate_jacobian)


def linear_problem(M, d, C, A, b, cost, partition):
    """Wrap a linear map as the nonlinear block (for exactness checks)."""
    M = np.asarray(M, dtype=float)
    d = np.asarray(d, dtype=float)

    def g(y):
        return M @ y + d

    def g_jacobian(y):
        return M.T.copy()

    return NlpProblem(cost=cost, eq_linear=C, ineq_matrix=A, ineq_rhs=b,
                      g=g, g_jacobian=g_jacobian, partition=partition,
                      check_ineq_rank=False)


class TestPartition:
    def test_disjoint_union_enforced(self):
        with pytest.raises(ValueError):
            VariablePartition(n_w=3, y_indices=np.array([0, 1]),
                              s_ocp_indices=np.array([1]),
                              s_nlp_indices=np.array([2]))
        with pytest.raises(ValueError):
            VariablePartition(n_w=4, y_indices=np.array([0, 1]),
                              s_ocp_indices=np.array([], dtype=int),
                              s_nlp_indices=np.array([2]))

    def test_selection_is_index_pick(self):
        part = VariablePartition(n_w=4, y_indices=np.array([2, 0]),
                                 s_ocp_indices=np.array([1]),
                                 s_nlp_indices=np.array([3]))
        w = np.array([10.0, 20.0, 30.0, 40.0])
        assert np.array_equal(part.select_y(w), [30.0, 10.0])


class TestInfeasibility:
    def test_worked_values(self):
        p = build_illustrative(0.06)
        assert infeasibility(p, np.array([1.0, 0.0, 0.0])) == pytest.approx(1.16)
        assert infeasibility(p, np.array([2.0, 10.0, 6.0])) == pytest.approx(0.0, abs=1e-14)

    def test_nonnegative_and_zero_iff_feasible(self):
        p = build_illustrative(-0.06)
        rng = np.random.default_rng(0)
        for _ in range(50):
            w = rng.normal(size=3) * 3.0
            h = infeasibility(p, w)
            assert h >= 0.0
            feasible = (abs(w[0] ** 2 - w[1] + w[2]) <= 1e-12
                        and 0.1 * w[0] - 0.06 - w[1] <= 1e-12 and -w[2] <= 1e-12)
            if feasible:
                assert h <= 1e-12

    def test_nan_surfaces_as_error(self):
        p = build_illustrative(0.06)
        with pytest.raises(EvaluationError):
            infeasibility(p, np.array([np.nan, 0.0, 0.0]))


class TestMinimalSlack:
    def test_pinned_by_equality(self):
        p = build_illustrative(0.06)
        s = minimal_slack(p, np.array([2.0, 10.0]))
        assert s == pytest.approx([6.0], abs=1e-10)

    def test_zero_when_already_feasible(self):
        p = build_illustrative(0.06)
        s = minimal_slack(p, np.array([0.0, 0.5]))
        # equality pins s = w2 - w1^2 = 0.5 (slack is nonnegative and feasible)
        assert s == pytest.approx([0.5], abs=1e-10)

    def test_infeasible_y_raises(self):
        p = build_illustrative(0.06)
        # w2 < w1^2 forces a negative reformulation slack: impossible
        with pytest.raises(InfeasibleSlackError):
            minimal_slack(p, np.array([2.0, 0.0]))

    def test_two_sided_interval_gives_absolute_residual(self):
        # min 5*s  s.t.  -s <= y - 1 <= s  (y fixed): optimum s = |y - 1|
        part = VariablePartition(n_w=2, y_indices=np.array([0]),
                                 s_ocp_indices=np.array([1]),
                                 s_nlp_indices=np.array([], dtype=int))

        def g(y):
            return np.zeros(0)

        def g_jac(y):
            return np.zeros((1, 0))

        p = NlpProblem(cost=np.array([0.0, 5.0]),
                       eq_linear=np.zeros((0, 2)),
                       ineq_matrix=np.array([[1.0, -1.0], [-1.0, -1.0], [0.0, -1.0]]),
                       ineq_rhs=np.array([-1.0, 1.0, 0.0]),
                       g=g, g_jacobian=g_jac, partition=part,
                       check_ineq_rank=False)
        for y in (3.0, -0.5, 1.0):
            s = minimal_slack(p, np.array([y]))
            assert s == pytest.approx([abs(y - 1.0)], abs=1e-10)

    def test_never_beats_other_slacks(self):
        p = build_illustrative(0.06)
        rng = np.random.default_rng(42)
        for _ in range(20):
            y = rng.normal(size=2) * 2.0
            try:
                s_star = minimal_slack(p, y)
            except InfeasibleSlackError:
                continue
            h_star = infeasibility(p, assemble_w(p, y, s_star))
            for _ in range(10):
                s_other = s_star + np.abs(rng.normal(size=1))
                h_other = infeasibility(p, assemble_w(p, y, s_other))
                assert h_star <= h_other + 1e-12


class TestLinearize:
    def test_scalar_square_jacobian(self):
        p = build_illustrative(0.06)
        lin = linearize(p, np.array([1.0, 1.0, 0.0]))
        assert lin.fixed_jacobian == pytest.approx(np.array([[2.0, 0.0, 0.0]]))
        assert lin.g_at_base == pytest.approx([1.0])

    def test_linear_g_embeds_transpose(self):
        part = VariablePartition(n_w=3, y_indices=np.array([0, 2]),
                                 s_ocp_indices=np.array([1]),
                                 s_nlp_indices=np.array([], dtype=int))
        M = np.array([[1.0, -2.0], [0.5, 4.0]])
        p = linear_problem(M, [0.0, 1.0],
                           C=np.zeros((2, 3)), A=np.zeros((0, 3)), b=np.zeros(0),
                           cost=np.zeros(3), partition=part)
        lin = linearize(p, np.array([1.0, 2.0, 3.0]))
        expect = np.zeros((2, 3))
        expect[:, [0, 2]] = M
        assert lin.fixed_jacobian == pytest.approx(expect)

    def test_linearization_exact_for_linear_g(self):
        rng = np.random.default_rng(5)
        part = VariablePartition(n_w=4, y_indices=np.array([0, 1, 3]),
                                 s_ocp_indices=np.array([2]),
                                 s_nlp_indices=np.array([], dtype=int))
        for _ in range(10):
            M = rng.normal(size=(2, 3))
            d = rng.normal(size=2)
            C = rng.normal(size=(2, 4))
            p = linear_problem(M, d, C=C, A=np.zeros((0, 4)), b=np.zeros(0),
                               cost=np.zeros(4), partition=part)
            base = rng.normal(size=4)
            lin = linearize(p, base)
            for _ in range(5):
                w = rng.normal(size=4)
                linearized = (C @ w + lin.g_at_base
                              + lin.fixed_jacobian @ (w - base))
                exact = C @ w + p.g(part.select_y(w))
                assert linearized == pytest.approx(exact, abs=1e-12)


class TestKktResidual:
    def test_exact_triple_small(self):
        # min w2 of the illustrative problem at its eps=0.06 optimum with the
        # analytically known multipliers lambda=0.2, pi=(0.8, 0.2).
        p = build_illustrative(0.06)
        w = np.array([-0.2, 0.04, 0.0])
        lam = np.array([0.2])
        pi = np.array([0.8, 0.2])
        assert kkt_residual(p, w, lam, pi) <= 1e-12

    def test_perturbed_multiplier_detected(self):
        p = build_illustrative(0.06)
        w = np.array([-0.2, 0.04, 0.0])
        lam = np.array([1.2])
        pi = np.array([0.8, 0.2])
        assert kkt_residual(p, w, lam, pi) > 1e-2


class TestJacobianValidation:
    def test_illustrative_matches_fd(self):
        p = build_illustrative(0.06)
        rng = np.random.default_rng(1)
        pts = [rng.normal(size=2) for _ in range(5)]
        assert validate_jacobian(p, pts) <= 1e-6


class TestRankWarning:
    def test_paired_box_rows_warn(self):
        part = VariablePartition(n_w=1, y_indices=np.array([0]),
                                 s_ocp_indices=np.array([], dtype=int),
                                 s_nlp_indices=np.array([], dtype=int))

        def g(y):
            return np.zeros(0)

        def g_jac(y):
            return np.zeros((1, 0))

        with pytest.warns(UserWarning):
            NlpProblem(cost=np.zeros(1), eq_linear=np.zeros((0, 1)),
                       ineq_matrix=np.array([[1.0], [-1.0]]),
                       ineq_rhs=np.array([-1.0, 0.0]),
                       g=g, g_jacobian=g_jac, partition=part)

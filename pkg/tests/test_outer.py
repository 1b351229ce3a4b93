"""Tests for the trust-region outer loop on the two-variable test problem."""

import numpy as np
import pytest

from fslp.illustrative import build_illustrative, known_optimum
from fslp.inner import InnerStatus
from fslp.nlp import assemble_w, infeasibility, kkt_residual, linearize, minimal_slack
from fslp.outer import (InfeasibleStartError, SolverParams, SolveStatus,
                        build_trust_region_lp, solve, tr_ratio, update_radius)


def start_point(p, y=(2.0, 10.0)):
    y = np.asarray(y, dtype=float)
    return assemble_w(p, y, minimal_slack(p, y))


class TestTrustRegionLp:
    def test_equality_row_hand_linearization(self):
        p = build_illustrative(0.06)
        lin = linearize(p, np.array([2.0, 10.0, 6.0]))
        lp = build_trust_region_lp(lin, p, 1.0)
        # 4*w1 - w2 + s - 4 = 0
        assert lp.eq_matrix == pytest.approx(np.array([[4.0, -1.0, 1.0]]))
        assert lp.eq_rhs == pytest.approx([-4.0])

    def test_box_intersection(self):
        p = build_illustrative(0.06)
        lin = linearize(p, np.array([2.0, 10.0, 6.0]))
        lp = build_trust_region_lp(lin, p, 3.0)
        assert lp.lower == pytest.approx([-1.0, 7.0, 0.0])
        assert lp.upper[0] == pytest.approx(5.0)
        assert lp.upper[1] == pytest.approx(13.0)
        assert lp.upper[2] == np.inf


class TestTrRatio:
    def test_identical_points(self):
        c = np.array([0.0, 1.0, 0.0])
        w_hat = np.array([1.0, 2.0, 0.0])
        w_bar = np.array([1.0, 1.0, 0.0])
        assert tr_ratio(c, w_hat, w_bar, w_bar) == pytest.approx(1.0)

    def test_arithmetic(self):
        c = np.array([1.0])
        assert tr_ratio(c, np.array([1.0]), np.array([0.0]),
                        np.array([0.5])) == pytest.approx(0.5)

    def test_sign(self):
        c = np.array([1.0])
        assert tr_ratio(c, np.array([1.0]), np.array([0.0]),
                        np.array([2.0])) < 0.0

    def test_zero_denominator_is_logic_error(self):
        c = np.array([1.0])
        w = np.array([1.0])
        with pytest.raises(ZeroDivisionError):
            tr_ratio(c, w, w, w + 1.0)


class TestUpdateRadius:
    def test_bad_step_shrinks_to_step_norm(self):
        params = SolverParams()
        assert update_radius(params, 0.1, 0.8, 1.0, True) == pytest.approx(0.2)

    def test_good_boundary_step_grows_capped(self):
        params = SolverParams(delta_max=10.0)
        assert update_radius(params, 0.9, 1.0, 1.0, True) == pytest.approx(2.0)
        assert update_radius(params, 0.9, 8.0, 8.0, True) == pytest.approx(10.0)

    def test_interior_step_keeps_radius(self):
        params = SolverParams()
        assert update_radius(params, 0.5, 0.3, 1.0, False) == pytest.approx(1.0)

    def test_inner_failure_shrinks(self):
        params = SolverParams()
        assert update_radius(params, None, 0.4, 1.0, False) == pytest.approx(0.1)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            SolverParams(sigma=0.3)
        with pytest.raises(ValueError):
            SolverParams(alpha1=1.5)
        with pytest.raises(ValueError):
            SolverParams(delta0=20.0, delta_max=10.0)
        with pytest.raises(ValueError):
            SolverParams(eta1=0.8, eta2=0.75)


class TestSolveFullyDetermined:
    def test_converges_to_vertex_optimum(self):
        p = build_illustrative(0.06)
        res = solve(p, start_point(p))
        assert res.status is SolveStatus.OPTIMAL
        w_star = known_optimum(0.06)
        assert np.linalg.norm(res.final_point[:2] - w_star) <= 1e-6

    def test_feasibility_invariant_every_iterate(self):
        p = build_illustrative(0.06)
        params = SolverParams()
        res = solve(p, start_point(p), params)
        for w in res.points:
            assert infeasibility(p, w) <= params.inner.sigma_inner

    def test_objective_monotone_over_iterates(self):
        p = build_illustrative(0.06)
        res = solve(p, start_point(p))
        objs = [r.objective for r in res.history]
        assert all(b <= a + 1e-12 for a, b in zip(objs, objs[1:]))

    def test_acceptance_consistency(self):
        p = build_illustrative(0.06)
        params = SolverParams()
        res = solve(p, start_point(p), params)
        for rec in res.history:
            if rec.accepted:
                assert rec.rho is not None and rec.rho > params.sigma
                assert rec.inner_status is InnerStatus.CONVERGED
                assert rec.projection_ratio is not None
                assert rec.projection_ratio < 0.5

    def test_superlinear_terminal_contraction(self):
        # The terminal accepted step contracts the error far beyond linearly
        # (the stricter banded formulation lives in the acceptance suite).
        p = build_illustrative(0.06)
        res = solve(p, start_point(p))
        w_star = known_optimum(0.06)
        errs = [np.linalg.norm(w[:2] - w_star) for w in res.points]
        errs.append(np.linalg.norm(res.final_point[:2] - w_star))
        found = any(0.0 < e1 <= e0 ** 1.8 for e0, e1 in zip(errs, errs[1:])
                    if 0.0 < e0 < 1.0)
        assert found, f"no superlinear contraction in error sequence {errs}"
        assert errs[-1] <= 1e-6

    def test_termination_model_small(self):
        # One-sided: the model no longer predicts a decrease beyond the
        # threshold (positive values can occur at tolerance-dust scale).
        p = build_illustrative(0.06)
        params = SolverParams()
        res = solve(p, start_point(p), params)
        assert res.history[-1].model_decrease >= -params.sigma_outer

    def test_final_duals_certify_kkt(self):
        p = build_illustrative(0.06)
        res = solve(p, start_point(p))
        lam, pi = res.final_duals
        assert kkt_residual(p, res.final_point, lam, pi) <= 1e-6


class TestSolveNotFullyDetermined:
    def test_stagnates_near_origin(self):
        p = build_illustrative(-0.06)
        res = solve(p, start_point(p))
        assert np.linalg.norm(res.final_point[:2] - known_optimum(-0.06)) <= 1e-3

    def test_no_superlinear_tail(self):
        p = build_illustrative(-0.06)
        res = solve(p, start_point(p))
        errs = [np.linalg.norm(w[:2]) for w in res.points]
        tail = [(e0, e1) for e0, e1 in zip(errs, errs[1:])
                if 0.0 < e0 < 1e-2 and e1 <= e0 ** 1.8]
        assert not tail, f"unexpected superlinear contraction pairs {tail[:3]}"


class TestStartHandling:
    def test_infeasible_start_rejected(self):
        p = build_illustrative(0.06)
        w0 = np.array([2.0, 0.0, 0.0])  # violates the equality by 4
        with pytest.raises(InfeasibleStartError):
            solve(p, w0)

    def test_tiny_infeasibility_repaired(self):
        p = build_illustrative(0.06)
        w0 = start_point(p)
        w0[2] += 5e-5  # nudge the slack off the equality (h ~ 5e-5 <= 1e-3)
        res = solve(p, w0)
        assert res.status is SolveStatus.OPTIMAL

    def test_start_at_optimum_stops_immediately(self):
        p = build_illustrative(0.06)
        w0 = assemble_w(p, known_optimum(0.06),
                        minimal_slack(p, known_optimum(0.06)))
        res = solve(p, w0)
        assert res.status is SolveStatus.OPTIMAL
        assert not any(r.accepted for r in res.history)
        assert len(res.history) == 1

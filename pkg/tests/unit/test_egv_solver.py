"""Tests for the EGV circuit solver and the feedback family"""

import numpy as np
import pytest

from amc_sim.compensation import re_egv
from amc_sim.core import DegenerateSolutionError, InputValidationError
from amc_sim.core.operators import vec
from amc_sim.oracle import ideal_egv
from amc_sim.solvers import (
    EgvProblem,
    EgvSolver,
    FeedbackFamily,
    jacobian_egv,
    residual_egv,
    solve_egv,
    sweep_g_lambda,
)


class TestEgvJacobian:
    """Stamped Jacobian against the residual"""

    @pytest.mark.parametrize("n", [4, 8])
    def test_linearity_identity(self, make_model, rng, n):
        """vec(F(V) - F(0)) == J vec(V) over random states"""
        problem = EgvProblem.at_dominant_eigenvalue(make_model(n, r=2.97, seed=n), v0=0.1)
        j = jacobian_egv(problem)
        f0 = residual_egv(np.zeros((n, n)), problem)
        worst = 0.0
        for _ in range(20):
            v = rng.normal(scale=0.1, size=(n, n))
            lhs = vec(residual_egv(v, problem) - f0)
            rhs = j.matvec(vec(v))
            worst = max(worst, np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))
        assert worst <= 1e-12

    @pytest.mark.parametrize("n", [32, 64, 128])
    def test_sparsity(self, make_model, n):
        """nnz bounded by 10 N^2"""
        j = jacobian_egv(EgvProblem.at_dominant_eigenvalue(make_model(n)))
        assert j.nnz <= 10 * n * n
        assert j.sparsity > 0.99

    def test_zero_drive_residual_defined(self, make_model):
        """V0 = 0 is a valid problem with F(0) = 0"""
        problem = EgvProblem(model=make_model(4), g_lambda=1e-4, v0=0.0)
        np.testing.assert_array_equal(residual_egv(np.zeros((4, 4)), problem), np.zeros((4, 4)))


class TestEgvSolver:
    """Eigenvector read-out"""

    @pytest.mark.parametrize("n", [4, 8])
    def test_small_wire_recovers_dominant_eigenvector(self, make_model, n):
        """G_lambda at lambda_max with tiny wires"""
        model = make_model(n, r=1e-3, seed=n)
        lam, x_ideal = ideal_egv(model.g)
        solution = EgvSolver(model, lam).solve(0.1)
        assert re_egv(solution.x_hat, x_ideal) <= 1e-3
        assert solution.rayleigh_quotient == pytest.approx(lam, rel=1e-3)

    def test_read_out_is_normalized_and_aligned(self, make_model):
        """Unit norm, non-negative sum"""
        model = make_model(6, r=4.53)
        solution = solve_egv(EgvProblem.at_dominant_eigenvalue(model))
        assert np.linalg.norm(solution.x_hat) == pytest.approx(1.0)
        assert solution.x_hat.sum() >= 0
        np.testing.assert_allclose(
            solution.raw, (model.g1 / ideal_egv(model.g)[0]) * solution.v_field[:, -1]
        )

    def test_read_out_independent_of_drive(self, make_model):
        """x_hat does not depend on V0 (linear circuit)"""
        model = make_model(5, r=1.55)
        solver = EgvSolver(model, ideal_egv(model.g)[0])
        np.testing.assert_allclose(solver.solve(0.1).x_hat, solver.solve(-0.3).x_hat, atol=1e-12)

    def test_raw_read_out_scales_with_drive(self, make_model):
        """Doubling V0 doubles the raw read-out and leaves x_hat alone"""
        model = make_model(8, r=2.97, seed=6)
        solver = EgvSolver(model, ideal_egv(model.g)[0])
        single = solver.solve(0.1)
        double = solver.solve(0.2)
        np.testing.assert_allclose(double.raw, 2.0 * single.raw, rtol=1e-10)
        np.testing.assert_allclose(double.x_hat, single.x_hat, atol=1e-12)

    @pytest.mark.parametrize("r", [1e-4, 1e-3])
    def test_rayleigh_defect_small_wire(self, make_model, r):
        """defect / lambda_max stays below 1e-3 for near-ideal wires"""
        model = make_model(8, r=r, seed=2)
        lam = ideal_egv(model.g)[0]
        solution = EgvSolver(model, lam).solve(0.1)
        assert solution.rayleigh_defect / lam <= 1e-3

    def test_zero_drive_rejected(self, make_model):
        """Nothing to read out at V0 = 0"""
        model = make_model(4)
        with pytest.raises(DegenerateSolutionError):
            EgvSolver(model, 1e-4).solve(0.0)

    def test_non_positive_g_lambda_rejected(self, make_model):
        """G_lambda must be positive"""
        with pytest.raises(ValueError):
            EgvProblem(model=make_model(4), g_lambda=0.0)


class TestFeedbackFamily:
    """Low-rank updated read-out against full solves"""

    @pytest.mark.parametrize("factor", [0.9, 1.0, 1.05])
    def test_matches_full_solve(self, make_model, factor):
        """Agreement to 1e-9 relative"""
        model = make_model(8, r=4.53, seed=3)
        g_lambda = ideal_egv(model.g)[0] * factor
        family = FeedbackFamily(model, v0=0.1, block_size=3)
        full = EgvSolver(model, g_lambda).solve(0.1).raw
        fast = family.raw_readout(g_lambda)
        assert np.linalg.norm(fast - full) / np.linalg.norm(full) <= 1e-9

    def test_zero_drive_rejected(self, make_model):
        """V0 = 0"""
        with pytest.raises(DegenerateSolutionError):
            FeedbackFamily(make_model(4), v0=0.0)

    @pytest.mark.parametrize("g_lambda", [0.0, -1e-4])
    def test_non_positive_g_lambda_rejected(self, make_model, g_lambda):
        """Read-out needs a positive feedback conductance"""
        family = FeedbackFamily(make_model(4), v0=0.1)
        with pytest.raises(InputValidationError):
            family.raw_readout(g_lambda)

    def test_sweep_finds_eigenvalue(self, make_model):
        """Rayleigh defect is smallest at lambda_max"""
        model = make_model(6, r=1e-3, seed=4)
        lam = ideal_egv(model.g)[0]
        points = sweep_g_lambda(model, [0.8 * lam, lam, 1.2 * lam])
        assert len(points) == 3
        defects = [p.rayleigh_defect for p in points]
        assert int(np.argmin(defects)) == 1

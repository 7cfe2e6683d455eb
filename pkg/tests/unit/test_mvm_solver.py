"""Tests for the MVM crossbar solver"""

import numpy as np
import pytest

from amc_sim.compensation import re_mvm
from amc_sim.core.operators import vec
from amc_sim.oracle import ideal_mvm
from amc_sim.solvers import MvmProblem, MvmSolver, jacobian_mvm, residual_mvm, solve_mvm
from amc_sim.solvers.mvm_solver import ideal_voltage_matrix
from amc_sim.workload import gen_input


class TestMvmJacobian:
    """Stamped Jacobian against the residual"""

    @pytest.mark.parametrize("n", [4, 8])
    def test_linearity_identity(self, make_model, rng, n):
        """vec(F(U) - F(0)) == J vec(U) over random states"""
        model = make_model(n, r=1.0, seed=n)
        problem = MvmProblem(model=model, v_in=gen_input(n, "voltage", seed=n))
        j = jacobian_mvm(model)
        f0 = residual_mvm(np.zeros((n, n)), problem)
        worst = 0.0
        for _ in range(20):
            u = rng.normal(scale=0.1, size=(n, n))
            lhs = vec(residual_mvm(u, problem) - f0)
            rhs = j.matvec(vec(u))
            worst = max(worst, np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))
        assert worst <= 1e-12

    @pytest.mark.parametrize("n", [32, 64, 128])
    def test_sparsity(self, make_model, n):
        """nnz bounded by 10 N^2"""
        j = jacobian_mvm(make_model(n))
        assert j.nnz <= 10 * n * n
        assert j.sparsity > 0.99

    def test_ideal_voltage_matrix(self):
        """Every row equals v_in"""
        v = np.array([0.1, 0.2, 0.15])
        np.testing.assert_array_equal(ideal_voltage_matrix(v), np.vstack([v, v, v]))


class TestMvmSolver:
    """Column currents"""

    def test_small_wire_matches_product(self, make_model):
        """i_out -> G^T v as the wires vanish"""
        model = make_model(8, r=1e-3, seed=2)
        v = gen_input(8, "voltage", seed=2)
        i_out = MvmSolver(model).solve(v).i_out
        assert re_mvm(i_out, ideal_mvm(model.g, v)) <= 1e-3

    def test_wires_reduce_currents(self, make_model):
        """IR drop lowers every sensed current"""
        model = make_model(16, r=4.53, seed=1)
        v = gen_input(16, "voltage", seed=1)
        i_out = MvmSolver(model).solve(v).i_out
        assert np.all(i_out < ideal_mvm(model.g, v))
        assert np.all(i_out > 0)

    def test_linear_in_input(self, make_model):
        """Scaling v scales i_out"""
        solver = MvmSolver(make_model(6, r=2.97))
        v = gen_input(6, "voltage", seed=9)
        np.testing.assert_allclose(solver.solve(2.0 * v).i_out, 2.0 * solver.solve(v).i_out, rtol=1e-10)

    def test_superposition(self, make_model):
        """i_out(v_a + v_b) = i_out(v_a) + i_out(v_b)"""
        solver = MvmSolver(make_model(8, r=4.53, seed=5))
        a = gen_input(8, "voltage", seed=1)
        b = gen_input(8, "voltage", seed=2)
        np.testing.assert_allclose(
            solver.solve(a + b).i_out, solver.solve(a).i_out + solver.solve(b).i_out, rtol=1e-10
        )

    def test_solve_mvm_wrapper(self, make_model):
        """Problem wrapper agrees with the bound solver"""
        model = make_model(4)
        v = gen_input(4, "voltage", seed=4)
        solution = solve_mvm(MvmProblem(model=model, v_in=v))
        np.testing.assert_array_equal(solution.i_out, MvmSolver(model).solve(v).i_out)
        np.testing.assert_array_equal(solution.i_out, model.g2 * solution.u_field[:, -1])

    def test_length_checked(self, make_model):
        """v_in length must equal n"""
        with pytest.raises(ValueError):
            MvmProblem(model=make_model(4), v_in=np.ones(2))

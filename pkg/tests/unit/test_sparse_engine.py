"""Tests for triplet assembly and the SuperLU wrapper"""

import threading

import numpy as np
import pytest

from amc_sim.core import AssemblyError, DimensionError, SingularSystemError
from amc_sim.sparse import (
    SparseSystem,
    TripletBuffer,
    compress,
    factorize,
    solve,
    sparsity_report,
)


class TestCompress:
    """Triplet buffer to CSC"""

    def test_duplicates_are_summed(self):
        """Repeated coordinates add up"""
        t = TripletBuffer(2)
        t.add(0, 0, 1.0)
        t.add(0, 0, 2.0)
        t.add(1, 1, 4.0)
        system = compress(t)
        assert system.toarray()[0, 0] == 3.0
        assert system.nnz == 2

    def test_cancelled_entries_dropped(self):
        """Exact cancellation leaves no stored zero"""
        t = TripletBuffer(2)
        t.add_many([0, 0, 1], [1, 1, 1], [1.0, -1.0, 5.0])
        assert compress(t).nnz == 1

    def test_scalar_values_broadcast(self):
        """add_many with one value for many indices"""
        t = TripletBuffer(3)
        t.add_many([0, 1, 2], [0, 1, 2], 2.0)
        assert len(t) == 3
        np.testing.assert_array_equal(compress(t).toarray(), 2.0 * np.eye(3))

    def test_out_of_range_index(self):
        """AssemblyError names the bad triplet"""
        t = TripletBuffer(2)
        t.add(0, 2, 1.0)
        with pytest.raises(AssemblyError):
            compress(t)

    def test_insertion_order_does_not_matter(self, rng):
        """Same triplets in another order give bit-identical values"""
        rows = rng.integers(0, 5, size=200)
        cols = rng.integers(0, 5, size=200)
        vals = rng.normal(size=200)
        a, b = TripletBuffer(5), TripletBuffer(5)
        a.add_many(rows, cols, vals)
        perm = rng.permutation(200)
        b.add_many(rows[perm], cols[perm], vals[perm])
        np.testing.assert_array_equal(compress(a).toarray(), compress(b).toarray())

    def test_empty_system(self):
        """Dimension 0 is allowed"""
        system = compress(TripletBuffer(0))
        assert system.dim == 0
        assert system.sparsity == 1.0

    def test_sparsity_report(self):
        """nnz and zero fraction"""
        system = SparseSystem.from_matrix(np.eye(4))
        assert sparsity_report(system) == (4, 0.75)


class TestFactorize:
    """LU factorization, equilibration and singularity detection"""

    def test_solve_matches_dense(self, rng):
        """Vector and matrix right-hand sides"""
        a = rng.normal(size=(6, 6)) + 6 * np.eye(6)
        fact = factorize(SparseSystem.from_matrix(a))
        b = rng.normal(size=6)
        np.testing.assert_allclose(solve(fact, b), np.linalg.solve(a, b), rtol=1e-12)
        block = rng.normal(size=(6, 3))
        np.testing.assert_allclose(fact.solve(block), np.linalg.solve(a, block), rtol=1e-12)
        assert fact.relative_residual(fact.solve(b), b) < 1e-14

    def test_fill_in_counts_factors(self, rng):
        """nnz(L) + nnz(U) covers the pattern of A"""
        a = rng.normal(size=(5, 5)) + 5 * np.eye(5)
        fact = factorize(SparseSystem.from_matrix(a))
        assert fact.fill_in >= 25
        assert fact.fill_ratio >= 1.0

    def test_badly_scaled_system_needs_equilibration(self):
        """Rows 24 orders of magnitude apart"""
        system = SparseSystem.from_matrix(np.diag([1e-12, 1e12]))
        with pytest.raises(SingularSystemError):
            factorize(system, equilibrate=False)
        x = factorize(system).solve(np.array([1e-12, 1e12]))
        np.testing.assert_allclose(x, [1.0, 1.0])

    def test_exactly_singular(self):
        """Rank-deficient matrix"""
        with pytest.raises(SingularSystemError):
            factorize(SparseSystem.from_matrix(np.array([[1.0, 1.0], [1.0, 1.0]])))

    def test_numerically_singular_reports_pivot(self):
        """Near-zero pivot gives an index in original column terms"""
        a = np.diag([1.0, 1.0, 1e-17])
        with pytest.raises(SingularSystemError) as exc_info:
            factorize(SparseSystem.from_matrix(a), equilibrate=False)
        assert exc_info.value.pivot_index == 2

    def test_rhs_shape_checked(self):
        """Wrong right-hand side length"""
        fact = factorize(SparseSystem.from_matrix(np.eye(3)))
        with pytest.raises(DimensionError):
            fact.solve(np.ones(4))

    def test_concurrent_solves(self, rng):
        """One factorization shared by several threads"""
        a = rng.normal(size=(20, 20)) + 20 * np.eye(20)
        fact = factorize(SparseSystem.from_matrix(a))
        rhs = [rng.normal(size=20) for _ in range(8)]
        results = [None] * 8

        def work(k):
            results[k] = fact.solve(rhs[k])

        threads = [threading.Thread(target=work, args=(k,)) for k in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for b, x in zip(rhs, results):
            np.testing.assert_allclose(a @ x, b, atol=1e-10)

    def test_non_square_rejected(self):
        """from_matrix needs a square matrix"""
        with pytest.raises(DimensionError):
            SparseSystem.from_matrix(np.ones((2, 3)))

"""Tests for the relative-error metrics"""

import numpy as np
import pytest

from amc_sim.compensation import delta_re, re_egv, re_inv
from amc_sim.core import DegenerateSolutionError


class TestReInv:
    """Raw Euclidean relative error"""

    def test_examples(self):
        """Exact, doubled and zero outputs"""
        x = np.array([1.0, -2.0, 0.5])
        assert re_inv(x, x) == 0.0
        assert re_inv(2 * x, x) == pytest.approx(1.0)
        assert re_inv(np.zeros(3), x) == pytest.approx(1.0)

    def test_zero_ideal(self):
        """Division by a zero-norm reference"""
        with pytest.raises(ZeroDivisionError):
            re_inv(np.ones(2), np.zeros(2))


class TestReEgv:
    """Normalized, sign-aligned error"""

    def test_scale_and_sign_invariant(self, rng):
        """c x for any c != 0 has zero error"""
        x = rng.normal(size=5)
        assert re_egv(3.0 * x, x) == pytest.approx(0.0, abs=1e-15)
        assert re_egv(-x, x) == pytest.approx(0.0, abs=1e-15)
        y = rng.normal(size=5)
        assert re_egv(-0.2 * y, x) == pytest.approx(re_egv(y, x))

    def test_orthogonal(self):
        """Orthogonal unit vectors are sqrt(2) apart"""
        assert re_egv(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(np.sqrt(2))

    def test_zero_vector(self):
        """Both vectors must be nonzero"""
        with pytest.raises(DegenerateSolutionError):
            re_egv(np.zeros(3), np.ones(3))


class TestDeltaRe:
    """Relative reduction"""

    @pytest.mark.parametrize(
        "baseline, minimum, expected", [(0.02, 0.01, 0.5), (0.3, 0.3, 0.0), (0.1, 0.025, 0.75)]
    )
    def test_examples(self, baseline, minimum, expected):
        """Reduction fraction"""
        assert delta_re(baseline, minimum) == pytest.approx(expected)

    def test_zero_baseline(self):
        """Nothing to reduce"""
        with pytest.raises(ZeroDivisionError):
            delta_re(0.0, 0.0)

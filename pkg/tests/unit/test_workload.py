"""Tests for random workload generation and technology presets"""

import time

import numpy as np
import pytest

from amc_sim.core import GenerationError, InputValidationError
from amc_sim.workload import (
    INPUT_RANGES,
    PRESETS,
    MatrixSpec,
    gen_input,
    gen_matrix,
    preset,
    resolve_resistance,
)


def _strictly_dominant(g: np.ndarray) -> bool:
    off = g.sum(axis=1) - np.diag(g)
    return bool(np.all(np.diag(g) > off))


class TestPresets:
    """Technology-node wire resistances"""

    @pytest.mark.parametrize(
        "label, r", [("baseline", 1.0), ("32nm", 1.55), ("22nm", 2.97), ("16nm", 4.53)]
    )
    def test_lookup(self, label, r):
        """Exact table values"""
        assert preset(label).r_wire == r

    def test_unknown_label(self):
        """Unknown node"""
        with pytest.raises(InputValidationError):
            preset("7nm")
        assert set(PRESETS) == {"baseline", "32nm", "22nm", "16nm"}

    def test_resolve_resistance(self):
        """Exactly one of r or node"""
        assert resolve_resistance(r_ohm=2.0) == 2.0
        assert resolve_resistance(node="16nm") == 4.53
        with pytest.raises(InputValidationError):
            resolve_resistance(2.0, "16nm")
        with pytest.raises(InputValidationError):
            resolve_resistance()
        with pytest.raises(InputValidationError):
            resolve_resistance(r_ohm=-1.0)


class TestGenMatrix:
    """Conductance matrices"""

    def test_dominant_symmetric_in_window(self):
        """n=4, seed=1"""
        g = gen_matrix(MatrixSpec(n=4, seed=1))
        np.testing.assert_array_equal(g, g.T)
        assert _strictly_dominant(g)
        assert g.min() >= 1e-5 and g.max() <= 1e-4

    def test_bounds_over_many_seeds(self):
        """Window and dominance hold across 1200 draws"""
        for seed in range(400):
            for n in (2, 3, 5):
                g = gen_matrix(MatrixSpec(n=n, seed=seed))
                assert g.min() >= 1e-5 and g.max() <= 1e-4
                assert _strictly_dominant(g)

    def test_deterministic(self):
        """Same seed, same matrix; other stream, other matrix"""
        spec = MatrixSpec(n=6, seed=7)
        np.testing.assert_array_equal(gen_matrix(spec), gen_matrix(spec))
        assert not np.array_equal(gen_matrix(spec, (1,)), gen_matrix(spec, (2,)))

    def test_positive_definite_kind(self):
        """Smallest eigenvalue is positive"""
        g = gen_matrix(MatrixSpec(n=8, kind="positive_definite", seed=3))
        np.testing.assert_array_equal(g, g.T)
        assert np.linalg.eigvalsh(g).min() > 0
        assert g.min() >= 1e-5 and g.max() <= 1e-4

    def test_strict_policy_infeasible(self):
        """Dominance cannot fit the window for large N"""
        with pytest.raises(GenerationError):
            gen_matrix(MatrixSpec(n=16, seed=0, floor_policy="strict"))

    def test_relaxed_policy_keeps_structure(self):
        """Off-diagonals may fall below g_min, everything else holds"""
        g = gen_matrix(MatrixSpec(n=32, seed=0, floor_policy="relax"))
        np.testing.assert_array_equal(g, g.T)
        assert _strictly_dominant(g)
        assert g.min() > 0 and g.max() <= 1e-4
        assert np.linalg.eigvalsh(g).min() > 0

    def test_weak_coupling_scales_offdiagonals(self):
        """Same draws, off-diagonals scaled by the coupling, diagonals near g_max"""
        full = gen_matrix(MatrixSpec(n=16, seed=3, floor_policy="relax"))
        weak = gen_matrix(MatrixSpec(n=16, seed=3, floor_policy="relax", coupling=0.01, slack_floor=0.9))
        off = ~np.eye(16, dtype=bool)
        np.testing.assert_allclose(weak[off], 0.01 * full[off], rtol=1e-12)
        np.testing.assert_array_equal(weak, weak.T)
        row_sum = weak.sum(axis=1) - np.diag(weak)
        assert np.all(np.diag(weak) >= row_sum + 0.9 * (1e-4 - row_sum) - 1e-18)
        assert np.diag(weak).max() <= 1e-4

    def test_weak_coupling_needs_relax(self):
        """coupling < 1 always leaves the window"""
        with pytest.raises(ValueError):
            MatrixSpec(n=4, coupling=0.5)
        with pytest.raises(ValueError):
            MatrixSpec(n=4, floor_policy="relax", coupling=0.0)

    def test_invalid_window(self):
        """g_min must be below g_max"""
        with pytest.raises(ValueError):
            MatrixSpec(n=4, g_min=1e-4, g_max=1e-5)


class TestGenInput:
    """Input vectors"""

    @pytest.mark.parametrize("kind", ["current", "voltage"])
    def test_range_and_determinism(self, kind):
        """Uniform within the documented range"""
        lo, hi = INPUT_RANGES[kind]
        x = gen_input(64, kind, seed=5)
        assert x.shape == (64,)
        assert np.all((x >= lo) & (x <= hi))
        np.testing.assert_array_equal(x, gen_input(64, kind, seed=5))

    def test_documented_ranges(self):
        """1-10 uA currents, 0.05-0.2 V voltages"""
        assert INPUT_RANGES["current"] == (1e-6, 1e-5)
        assert INPUT_RANGES["voltage"] == (0.05, 0.2)

    def test_unknown_kind(self):
        """Only current or voltage"""
        with pytest.raises(InputValidationError):
            gen_input(4, "charge", seed=0)

    def test_large_draw_is_fast(self):
        """n=1024 in under 10 ms"""
        gen_input(1024, "current", seed=0)
        start = time.perf_counter()
        x = gen_input(1024, "current", seed=1, stream=(1024, 0))
        assert time.perf_counter() - start < 0.01
        assert x.shape == (1024,)

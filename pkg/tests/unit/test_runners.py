"""Tests for single-cell, sweep and bench runners"""

import multiprocessing
import time

import numpy as np
import pytest

from amc_sim.core import InputValidationError, SingularSystemError
from amc_sim.services import (
    BenchRunner,
    SimulationRunner,
    SweepRunner,
    build_cells,
    fit_loglog_slope,
)


class TestSimulationRunner:
    """One (circuit, n, r, trial) cell"""

    @pytest.mark.parametrize("circuit", ["inv", "egv", "mvm"])
    def test_cell_against_oracle(self, default_config, circuit):
        """Solver and nodal oracle agree on a small instance"""
        runner = SimulationRunner(default_config)
        model = runner.build_model(4, 1.0, seed=3)
        result = runner.run_cell(circuit, model, seed=3, oracle=True)
        record = result.record
        assert record.status == "ok"
        assert record.re_vs_oracle is not None
        assert record.re_vs_oracle <= 1e-8
        assert record.nnz > 0
        assert result.output.shape == (4,)

    def test_oracle_skipped_above_limit(self, default_config):
        """No oracle column beyond oracle.max_n"""
        default_config["oracle"]["max_n"] = 2
        runner = SimulationRunner(default_config)
        result = runner.run_cell("inv", runner.build_model(4, 1.0, seed=0), oracle=True)
        assert result.record.re_vs_oracle is None
        assert result.oracle_output is None

    def test_generated_matrix_depends_on_trial(self, default_config):
        """Trials draw independent matrices from one seed"""
        runner = SimulationRunner(default_config)
        a = runner.generate_matrix(5, seed=1, trial=0)
        b = runner.generate_matrix(5, seed=1, trial=1)
        assert not np.array_equal(a, b)
        np.testing.assert_array_equal(a, runner.generate_matrix(5, seed=1, trial=0))

    def test_compensation_workload_overrides(self, default_config):
        """The bias search draws weakly coupled INV matrices, other circuits keep the workload"""
        runner = SimulationRunner(default_config)
        inv = runner.compensation_workload("inv")
        assert inv["coupling"] == pytest.approx(0.01)
        assert inv["slack_floor"] == pytest.approx(0.9)
        assert inv["g_max"] == default_config["workload"]["g_max"]
        assert runner.compensation_workload("egv") == default_config["workload"]

        weak = runner.generate_matrix(16, seed=2, workload=inv)
        full = runner.generate_matrix(16, seed=2)
        off = ~np.eye(16, dtype=bool)
        assert weak[off].max() < 0.02 * full[off].max()
        assert np.all(np.diag(weak) > weak.sum(axis=1) - np.diag(weak))

    def test_failure_record(self):
        """Category prefix in the error column"""
        record = SimulationRunner.failure_record(
            "inv", 4, 1.0, SingularSystemError("zero pivot", pivot_index=2), node="16nm"
        )
        assert record.status == "failed"
        assert record.error.startswith("singular_system: ")
        assert record.re_vs_ideal is None

    def test_unknown_circuit(self, default_config):
        runner = SimulationRunner(default_config)
        with pytest.raises(ValueError):
            runner.run_cell("adc", runner.build_model(4, 1.0, seed=0))


class TestBuildCells:
    """Sweep grid"""

    def test_order(self):
        """(circuit, n, node, trial) product order"""
        cells = build_cells(["inv", "mvm"], [4, 8], ["baseline", "16nm"], 2)
        assert len(cells) == 16
        assert (cells[0].circuit, cells[0].n, cells[0].node, cells[0].trial) == ("inv", 4, "baseline", 0)
        assert (cells[1].node, cells[1].trial) == ("baseline", 1)
        assert cells[-1].circuit == "mvm"
        assert cells[2].r_ohm > cells[0].r_ohm

    @pytest.mark.parametrize("kwargs", [
        dict(circuits=["adc"], sizes=[4], presets=["baseline"]),
        dict(circuits=["inv"], sizes=[1], presets=["baseline"]),
        dict(circuits=["inv"], sizes=[4], presets=["7nm"]),
    ])
    def test_rejects_bad_grid(self, kwargs):
        with pytest.raises(InputValidationError):
            build_cells(trials=1, **kwargs)


class TestSweepRunner:
    """Bounded concurrent sweep"""

    def test_small_sweep(self, default_config):
        """Every cell reported, in input order"""
        cells = build_cells(["inv", "egv", "mvm"], [3, 5], ["baseline", "16nm"], 1)
        records = SweepRunner(default_config, seed=4, max_concurrent=3).run(cells)
        assert len(records) == len(cells)
        assert [(r.circuit, r.n, r.node) for r in records] == [(c.circuit, c.n, c.node) for c in cells]
        assert all(r.status == "ok" for r in records)
        assert all(r.seed == 4 for r in records)

    def test_failed_cell_does_not_stop_sweep(self, default_config):
        """A zero EGV drive fails its cells only"""
        default_config["egv"]["v0"] = 0.0
        cells = build_cells(["inv", "egv"], [4], ["baseline"], 1)
        records = SweepRunner(default_config, max_concurrent=2).run(cells)
        assert records[0].status == "ok"
        assert records[1].status == "failed"
        assert records[1].error.startswith("internal_error: ")

    def test_deterministic(self, default_config):
        """Concurrency does not change results"""
        cells = build_cells(["mvm"], [4, 6], ["22nm"], 2)
        one = SweepRunner(default_config, seed=9, max_concurrent=1).run(cells)
        many = SweepRunner(default_config, seed=9, max_concurrent=4).run(cells)
        assert [r.re_vs_ideal for r in one] == [r.re_vs_ideal for r in many]


class TestFitLoglogSlope:
    """Slope over the larger half of the sizes"""

    def test_cubic(self):
        sizes = [8, 16, 32, 64]
        assert fit_loglog_slope(sizes, [float(n) ** 3 for n in sizes]) == pytest.approx(3.0)

    def test_uses_upper_half(self):
        """Small sizes dominated by overhead are ignored"""
        sizes = [8, 16, 32, 64]
        runtimes = [100.0, 100.0, 32.0 ** 2, 64.0 ** 2]
        assert fit_loglog_slope(sizes, runtimes) == pytest.approx(2.0)

    def test_too_few_points(self):
        assert fit_loglog_slope([8], [1.0]) is None
        assert fit_loglog_slope([8, 16], [1.0, 0.0]) is None


class TestBenchRunner:
    """Per-size medians, one worker process per size"""

    def test_small_sizes(self, default_config):
        """Rows for every size and a fitted slope"""
        report = BenchRunner(default_config, r_ohm=1.0, seed=2).run(
            "inv", [4, 8, 16], repetitions=3, oracle_max_n=8
        )
        assert [r.n for r in report.rows] == [4, 8, 16]
        assert all(r.status == "ok" for r in report.rows)
        assert all(r.nnz_per_n2 <= 10 for r in report.rows)
        assert all(r.peak_fill_in > 0 and r.fill_ratio > 0 for r in report.rows)
        assert all(r.permc_spec == report.permc_spec for r in report.rows)
        assert report.rows[0].oracle_ms is not None
        assert report.rows[2].oracle_ms is None
        assert report.slope is not None
        assert multiprocessing.active_children() == []

    @pytest.mark.parametrize("circuit", ["egv", "mvm"])
    def test_other_circuits(self, default_config, circuit):
        report = BenchRunner(default_config).run(circuit, [4, 6], repetitions=3, oracle_max_n=0)
        assert all(r.status == "ok" for r in report.rows)

    def test_timeout_terminates_worker(self, default_config):
        """An overrun size is stopped, later sizes are skipped and no worker is left behind"""
        start = time.perf_counter()
        report = BenchRunner(default_config).run(
            "inv", [8, 16, 32], repetitions=3, timeout_per_size=1e-3, oracle_max_n=0
        )
        assert time.perf_counter() - start < 60
        assert [r.status for r in report.rows] == ["skipped"] * 3
        assert report.rows[0].note.startswith("timeout after")
        assert report.rows[1].note == "skipped after timeout at N=8"
        assert report.slope is None
        assert multiprocessing.active_children() == []

    def test_rows_reported_as_they_complete(self, default_config):
        """on_row sees every row in size order"""
        seen = []
        report = BenchRunner(default_config).run(
            "mvm", [4, 6, 8], repetitions=3, oracle_max_n=0, on_row=seen.append
        )
        assert seen == report.rows

    def test_ordering_with_least_fill(self, default_config):
        """The pilot keeps the candidate with the smallest nnz(L) + nnz(U)"""
        runner = BenchRunner(default_config)
        best, fill = runner.choose_ordering("inv", 16, ["NATURAL", "MMD_AT_PLUS_A", "COLAMD"])
        assert set(fill) == {"NATURAL", "MMD_AT_PLUS_A", "COLAMD"}
        assert fill[best] == min(fill.values())
        assert runner.choose_ordering("inv", 16, ["COLAMD"]) == ("COLAMD", {})

    @pytest.mark.parametrize("orderings", [[], ["AMD"], ["COLAMD", "metis"]])
    def test_rejects_bad_orderings(self, default_config, orderings):
        with pytest.raises(InputValidationError):
            BenchRunner(default_config).choose_ordering("inv", 8, orderings)

    @pytest.mark.parametrize("sizes,repetitions", [
        ([8, 4], 3),
        ([4, 4], 3),
        ([1, 4], 3),
        ([], 3),
        ([4, 8], 2),
    ])
    def test_rejects_bad_arguments(self, default_config, sizes, repetitions):
        with pytest.raises(InputValidationError):
            BenchRunner(default_config).run("inv", sizes, repetitions=repetitions)

"""Tests for the nodal-analysis oracle"""

import numpy as np
import pytest

from amc_sim.core import CrossbarModel, InputValidationError, SingularSystemError
from amc_sim.oracle import (
    GROUND,
    NodalSystem,
    build_egv_unreduced,
    build_inv_netlist,
    build_mvm_netlist,
    dump_netlist,
    solve_nodal,
)


class TestNodalSystem:
    """Generic resistive networks with sources and nullors"""

    def test_voltage_divider(self):
        """1 V across two equal conductances"""
        system = NodalSystem("divider")
        system.add_voltage_source("A", 1.0)
        system.add_conductance("A", "B", 1e-3)
        system.add_conductance("B", GROUND, 1e-3)
        solution = solve_nodal(system)
        assert solution.voltage("B") == pytest.approx(0.5)
        assert solution.voltage(GROUND) == 0.0
        assert solution.max_kcl_residual < 1e-15

    def test_current_source_into_resistor(self):
        """V = I / G"""
        system = NodalSystem()
        system.add_current_source("A", 2e-6)
        system.add_conductance("A", GROUND, 1e-5)
        assert solve_nodal(system).voltage("A") == pytest.approx(0.2)

    def test_inverting_amplifier(self):
        """Gain -G_in / G_f with a virtual ground at the input"""
        system = NodalSystem("inverter")
        system.add_voltage_source("VS", 1.0)
        system.add_conductance("VS", "IN", 1e-3)
        system.add_conductance("IN", "OUT", 2e-3)
        system.add_opamp("IN", "OUT")
        solution = solve_nodal(system)
        assert solution.voltage("OUT") == pytest.approx(-0.5)
        assert solution.opamp_inputs[0] == pytest.approx(0.0, abs=1e-15)
        assert system.constraint_count == 2
        np.testing.assert_array_equal(system.kcl_nodes, [system.node("IN")])

    def test_floating_node_is_singular(self):
        """No path to ground"""
        system = NodalSystem()
        system.add_conductance("A", "B", 1e-3)
        with pytest.raises(SingularSystemError):
            solve_nodal(system)

    def test_wiring_errors(self):
        """Grounded op-amp input, double-driven node, bad conductance"""
        system = NodalSystem()
        with pytest.raises(InputValidationError):
            system.add_opamp(GROUND, "OUT")
        system.add_voltage_source("A", 1.0)
        with pytest.raises(InputValidationError):
            system.add_opamp("B", "A")
        with pytest.raises(InputValidationError):
            system.add_conductance("A", "B", 0.0)

    def test_dump_netlist(self):
        """Listing names every element"""
        system = NodalSystem("demo")
        system.add_voltage_source("VS", 1.0)
        system.add_conductance("VS", "IN", 1e-3)
        system.add_opamp("IN", "OUT")
        text = dump_netlist(system)
        assert text.startswith("* demo\n")
        assert "G0 VS IN" in text
        assert "V0 VS gnd" in text
        assert "X0 +gnd -IN out=OUT" in text


class TestCrossbarNetlists:
    """Node and op-amp counts of the three circuits at N = 2"""

    def test_inv_counts(self, sample_matrix):
        """2N^2 array nodes plus N op-amp outputs"""
        model = CrossbarModel.from_resistance(sample_matrix[:2, :2], 1.0)
        system = build_inv_netlist(model, [1e-6, 2e-6])
        assert system.node_count == 10
        assert len(system.opamps) == 2
        assert system.constraint_count == 2
        assert len(system.conductances) == 4 + 2 + 2 + 2

    def test_mvm_counts(self, sample_matrix):
        """Array, sources, sense inputs and amplifier outputs"""
        model = CrossbarModel.from_resistance(sample_matrix[:2, :2], 1.0)
        system = build_mvm_netlist(model, [0.1, 0.2])
        assert system.node_count == 14
        assert len(system.opamps) == 2
        assert system.constraint_count == 4

    def test_egv_counts(self, sample_matrix):
        """Transimpedance and inverter stages per row plus the drive"""
        model = CrossbarModel.from_resistance(sample_matrix[:2, :2], 1.0)
        system = build_egv_unreduced(model, g_lambda=1e-4, v0=0.1)
        assert system.node_count == 17
        assert len(system.opamps) == 4
        assert system.constraint_count == 5

    def test_kcl_closes(self, sample_matrix):
        """Every free node balances"""
        model = CrossbarModel.from_resistance(sample_matrix, 4.53)
        solution = solve_nodal(build_inv_netlist(model, [1e-6, 2e-6, 3e-6, 4e-6]))
        assert solution.max_kcl_residual <= 1e-12 * solution.current_scale

    def test_bad_inputs(self, sample_matrix):
        """Wrong drive length and non-positive G_lambda"""
        model = CrossbarModel.from_resistance(sample_matrix, 1.0)
        with pytest.raises(InputValidationError):
            build_inv_netlist(model, [1e-6])
        with pytest.raises(InputValidationError):
            build_egv_unreduced(model, g_lambda=-1.0, v0=0.1)

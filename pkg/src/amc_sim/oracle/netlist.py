"""
Nodal analysis with ideal op-amps.

Every node gets one unknown voltage. Nodes whose voltage is imposed (op-amp
outputs and voltage-source terminals) carry no KCL row; their row holds the
constraint instead (op-amp input at 0 V, or the source voltage), so the
system stays square. All op-amps have their non-inverting input grounded.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.exceptions import InputValidationError, SingularSystemError
from ..sparse import SparseSystem, TripletBuffer, compress, factorize

GROUND = "gnd"


class NodalSystem:
    """Resistive network with current sources, grounded voltage sources and nullors"""

    def __init__(self, name: str = "circuit"):
        self.name = name
        self._index: Dict[str, int] = {}
        self.names: List[str] = []
        self.conductances: List[Tuple[int, int, float]] = []
        self.current_sources: List[Tuple[int, float]] = []
        self.voltage_sources: List[Tuple[int, float]] = []
        self.opamps: List[Tuple[int, int]] = []
        self._driven: Dict[int, str] = {}

    def node(self, name: str) -> int:
        """Index of a node, created on first use; ground is -1"""
        if name == GROUND:
            return -1
        if name not in self._index:
            self._index[name] = len(self.names)
            self.names.append(name)
        return self._index[name]

    def _drive(self, node: int, by: str) -> None:
        if node < 0:
            raise InputValidationError(f"{by} cannot drive ground")
        if node in self._driven:
            raise InputValidationError(
                f"Node {self.names[node]} already driven by {self._driven[node]}"
            )
        self._driven[node] = by

    def add_conductance(self, a: str, b: str, g: float) -> None:
        if not np.isfinite(g) or g <= 0:
            raise InputValidationError(f"Conductance between {a} and {b} must be positive, got {g}")
        self.conductances.append((self.node(a), self.node(b), float(g)))

    def add_current_source(self, node: str, amps: float) -> None:
        """Current ``amps`` injected into ``node`` from ground"""
        self.current_sources.append((self.node(node), float(amps)))

    def add_voltage_source(self, node: str, volts: float) -> None:
        """Ideal source between ``node`` and ground"""
        idx = self.node(node)
        self._drive(idx, "voltage source")
        self.voltage_sources.append((idx, float(volts)))

    def add_opamp(self, inverting_input: str, output: str) -> None:
        """Ideal op-amp: V(input) = 0, V(output) free"""
        inp, out = self.node(inverting_input), self.node(output)
        if inp < 0:
            raise InputValidationError("Op-amp inverting input cannot be ground")
        self._drive(out, f"op-amp {len(self.opamps)}")
        self.opamps.append((inp, out))

    @property
    def node_count(self) -> int:
        return len(self.names)

    @property
    def kcl_nodes(self) -> np.ndarray:
        return np.array([k for k in range(self.node_count) if k not in self._driven], dtype=int)

    @property
    def constraint_count(self) -> int:
        return len(self._driven)

    def assemble(self) -> Tuple[SparseSystem, np.ndarray]:
        """Square system (one row per node) and its right-hand side"""
        dim = self.node_count
        buffer = TripletBuffer(dim)
        rhs = np.zeros(dim)
        driven = np.zeros(dim, dtype=bool)
        driven[list(self._driven)] = True

        if self.conductances:
            a, b, g = (np.array(col) for col in zip(*self.conductances))
            a, b = a.astype(int), b.astype(int)
            for src, dst in ((a, b), (b, a)):
                rows = (src >= 0) & ~driven[np.where(src >= 0, src, 0)]
                buffer.add_many(src[rows], src[rows], g[rows])
                to_node = rows & (dst >= 0)
                buffer.add_many(src[to_node], dst[to_node], -g[to_node])

        for node, amps in self.current_sources:
            if node >= 0 and not driven[node]:
                rhs[node] += amps
        for node, volts in self.voltage_sources:
            buffer.add(node, node, 1.0)
            rhs[node] = volts
        for inp, out in self.opamps:
            buffer.add(out, inp, 1.0)
        return compress(buffer), rhs


@dataclass(frozen=True)
class OracleSolution:
    voltages: np.ndarray
    names: Tuple[str, ...]
    opamp_outputs: np.ndarray
    opamp_inputs: np.ndarray
    kcl_residuals: np.ndarray
    current_scale: float

    @property
    def max_kcl_residual(self) -> float:
        return float(np.max(np.abs(self.kcl_residuals), initial=0.0))

    def voltage(self, name: str) -> float:
        if name == GROUND:
            return 0.0
        return float(self.voltages[self.names.index(name)])


def kcl_residuals(system: NodalSystem, voltages: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Net current leaving each KCL node, recomputed from the element list.

    Returns:
        (residuals over system.kcl_nodes, largest element or source current)
    """
    padded = np.append(voltages, 0.0)
    leaving = np.zeros(system.node_count + 1)
    scale = 0.0
    if system.conductances:
        a, b, g = (np.array(col) for col in zip(*system.conductances))
        a, b = a.astype(int), b.astype(int)
        current = g * (padded[a] - padded[b])
        np.add.at(leaving, a, current)
        np.add.at(leaving, b, -current)
        scale = float(np.max(np.abs(current)))
    for node, amps in system.current_sources:
        leaving[node] -= amps
        scale = max(scale, abs(amps))
    return leaving[system.kcl_nodes], scale


def solve_nodal(
    system: NodalSystem,
    permc_spec: str = "COLAMD",
    equilibrate: bool = True,
    logger: Optional[logging.Logger] = None
) -> OracleSolution:
    """
    Direct solve of the nodal system.

    Raises:
        SingularSystemError: floating subnetwork or degenerate op-amp wiring
    """
    logger = logger or logging.getLogger(__name__)
    if system.node_count == 0:
        raise SingularSystemError("Nodal system has no nodes")
    matrix, rhs = system.assemble()
    fact = factorize(matrix, permc_spec=permc_spec, equilibrate=equilibrate)
    voltages = fact.solve(rhs)
    residuals, scale = kcl_residuals(system, voltages)
    inputs = np.array([voltages[i] if i >= 0 else 0.0 for i, _ in system.opamps])
    outputs = np.array([voltages[o] for _, o in system.opamps])
    solution = OracleSolution(
        voltages=voltages,
        names=tuple(system.names),
        opamp_outputs=outputs,
        opamp_inputs=inputs,
        kcl_residuals=residuals,
        current_scale=scale,
    )
    logger.debug(
        f"{system.name}: {system.node_count} nodes, {len(system.opamps)} op-amps, "
        f"max KCL residual {solution.max_kcl_residual:.3e} A"
    )
    return solution


def dump_netlist(system: NodalSystem) -> str:
    """Human-readable listing of nodes, elements, sources and op-amps"""

    def label(idx: int) -> str:
        return GROUND if idx < 0 else system.names[idx]

    lines = [
        f"* {system.name}",
        f"* nodes={system.node_count} opamps={len(system.opamps)} "
        f"conductances={len(system.conductances)}",
    ]
    for k, (a, b, g) in enumerate(system.conductances):
        lines.append(f"G{k} {label(a)} {label(b)} {g:.9e}")
    for k, (node, amps) in enumerate(system.current_sources):
        lines.append(f"I{k} {GROUND} {label(node)} {amps:.9e}")
    for k, (node, volts) in enumerate(system.voltage_sources):
        lines.append(f"V{k} {label(node)} {GROUND} {volts:.9e}")
    for k, (inp, out) in enumerate(system.opamps):
        lines.append(f"X{k} +{GROUND} -{label(inp)} out={label(out)}")
    return "\n".join(lines) + "\n"
